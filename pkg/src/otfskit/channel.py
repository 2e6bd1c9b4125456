"""Effective DD channel synthesis and the full DD-domain channel matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import window_index_map
from .grid import GridConfig, PathSet
from .kernel import dirichlet


@dataclass(frozen=True)
class EffectiveChannel:
    """Effective DD response: pilot-window crop plus optional full grid."""

    window: np.ndarray
    full_grid: np.ndarray | None = None


@dataclass(frozen=True)
class DDChannelMatrix:
    """Dense MN x MN DD-domain channel, vectorization index l + M*k."""

    entries: np.ndarray
    M: int
    N: int

    @property
    def shape(self):
        return self.entries.shape


def effective_full_grid(paths: PathSet, cfg: GridConfig) -> np.ndarray:
    """M x N effective response: coherent sum of per-path spreading kernels."""
    H = np.zeros((cfg.M, cfg.N), dtype=complex)
    if len(paths) == 0:
        return H
    ell = np.arange(cfg.M, dtype=float)
    kk = np.arange(cfg.N, dtype=float)
    for p in paths.paths:
        d = dirichlet(ell - p.delay_bins, cfg.M)
        g = np.conj(dirichlet(kk - p.doppler_bins, cfg.N))
        H += p.h * np.outer(d, g)
    return H


def effective_window(paths: PathSet, cfg: GridConfig) -> np.ndarray:
    """Effective response evaluated only at the observation-window indices.

    The kernels are periodic in their grid index, so this equals cropping
    the full grid at the window index map.
    """
    rows, cols = window_index_map(cfg)
    H = np.zeros((cfg.M_tau, cfg.N_nu), dtype=complex)
    for p in paths.paths:
        d = dirichlet(rows.astype(float) - p.delay_bins, cfg.M)
        g = np.conj(dirichlet(cols.astype(float) - p.doppler_bins, cfg.N))
        H += p.h * np.outer(d, g)
    return H


def effective_channel(paths: PathSet, cfg: GridConfig, scope: str = "window") -> EffectiveChannel:
    """Synthesize the effective DD channel over the requested scope.

    scope="window" restricts to the M_tau x N_nu observation window and
    rejects path sets whose integer taps violate the spread bounds;
    scope="full" evaluates the whole (circular) M x N grid.
    """
    if scope not in ("window", "full"):
        raise ValueError(f"unknown scope {scope!r}")
    if scope == "window":
        paths.validate_support(cfg)
        return EffectiveChannel(window=effective_window(paths, cfg))
    full = effective_full_grid(paths, cfg)
    return EffectiveChannel(window=window_crop(full, cfg), full_grid=full)


def window_crop(full_grid: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Sample an M x N grid at the pilot observation window indices."""
    rows, cols = window_index_map(cfg)
    return full_grid[np.ix_(rows, cols)]


def embed_window(window: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Inverse of `window_crop`: place a window into an all-zero M x N grid."""
    if window.shape != (cfg.M_tau, cfg.N_nu):
        raise ValueError(f"window shape {window.shape} != {(cfg.M_tau, cfg.N_nu)}")
    rows, cols = window_index_map(cfg)
    full = np.zeros((cfg.M, cfg.N), dtype=complex)
    full[np.ix_(rows, cols)] = window
    return full


def build_hdd(h_eff_full: np.ndarray, cfg: GridConfig) -> DDChannelMatrix:
    """Assemble the 2-D circulant DD channel matrix from the full response.

    Entry ((l', k'), (l, k)) = H_eff((l'-l) mod M, (k'-k) mod N); applying
    it to vec(X) performs the 2-D circular convolution H_eff (*) X.
    """
    M, N = cfg.M, cfg.N
    if h_eff_full.shape != (M, N):
        raise ValueError(f"expected {(M, N)} grid, got {h_eff_full.shape}")
    MN = M * N
    H = np.empty((MN, MN), dtype=complex)
    for k in range(N):
        for l in range(M):
            col = np.roll(h_eff_full, shift=(l, k), axis=(0, 1))
            H[:, l + M * k] = col.reshape(-1, order="F")
    return DDChannelMatrix(entries=H, M=M, N=N)


def vec(X: np.ndarray) -> np.ndarray:
    """Column-major vectorization: vec(X)[l + M*k] = X[l, k]."""
    return X.reshape(-1, order="F")


def unvec(x: np.ndarray, M: int, N: int) -> np.ndarray:
    return x.reshape((M, N), order="F")
