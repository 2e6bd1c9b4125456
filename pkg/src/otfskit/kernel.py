"""Fractional delay-Doppler spreading kernel.

A path at fractional delay `a` bins and fractional Doppler `b` bins leaks
energy onto neighbouring grid points through a separable product of two
periodic Dirichlet kernels,

    alpha(dl, dk) = D_M(dl - a) * G_N(dk - b),

with D_M(x) = (1/M) sum_m exp(+j 2 pi m x / M) along delay and
G_N(y) = (1/N) sum_n exp(-j 2 pi n y / N) along Doppler.  Both collapse to
a single unit coefficient when the offset is an exact integer.
"""

from __future__ import annotations

import numpy as np

# |wrapped offset| below which the 0/0 limit (value 1) is substituted
_SING_TOL = 1e-12


def dirichlet(x, M: int) -> np.ndarray | complex:
    """Closed form of (1/M) sum_{m=0}^{M-1} exp(j 2 pi m x / M).

    Periodic in x with period M; equals 1 at x = 0 mod M (handled as a
    limit, not a division).
    """
    x = np.asarray(x, dtype=float)
    w = x - M * np.round(x / M)  # wrap to [-M/2, M/2], same value by periodicity
    safe = np.where(np.abs(w) < _SING_TOL, 1.0, w)
    ratio = np.sin(np.pi * safe) / (M * np.sin(np.pi * safe / M))
    mag = np.where(np.abs(w) < _SING_TOL, 1.0, ratio)
    out = mag * np.exp(1j * np.pi * w * (M - 1) / M)
    if out.ndim == 0:
        return complex(out)
    return out


def dirichlet_direct(x, M: int) -> np.ndarray | complex:
    """O(M) summation form of `dirichlet`; retained as a test oracle."""
    x = np.asarray(x, dtype=float)
    m = np.arange(M)
    out = np.exp(2j * np.pi * x[..., None] * m / M).mean(axis=-1)
    if out.ndim == 0:
        return complex(out)
    return out


def kernel_alpha(dl, dk, a: float, b: float, M: int, N: int, direct: bool = False):
    """Spreading coefficient at grid offset (dl, dk) for a path at (a, b).

    `a` and `b` are the path's total delay and Doppler in fractional bins
    (integer part + offset).  Broadcasts over array-valued dl/dk.
    """
    fn = dirichlet_direct if direct else dirichlet
    dl = np.asarray(dl, dtype=float)
    dk = np.asarray(dk, dtype=float)
    delay_part = fn(dl - a, M)
    doppler_part = np.conj(fn(dk - b, N))
    out = np.asarray(delay_part) * np.asarray(doppler_part)
    if out.ndim == 0:
        return complex(out)
    return out
