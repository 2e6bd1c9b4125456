"""OTFS modulation, demodulation, and the time-domain channel path.

Rectangular transmit/receive pulses (G_tx = G_rx = I) and unitary DFTs
throughout, so ISFFT/SFFT are exact inverses and frame energy is
preserved.  One cyclic prefix per OTFS frame, stripped before
demodulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import DDChannelMatrix
from .grid import GridConfig, PathSet

GRID_ROLES = ("tx_symbols", "rx_symbols", "channel_response")


@dataclass(frozen=True)
class DDGrid:
    """An M x N complex DD grid tagged with its role in the link."""

    data: np.ndarray
    role: str = "tx_symbols"

    def __post_init__(self):
        if self.role not in GRID_ROLES:
            raise ValueError(f"unknown grid role {self.role!r}")
        if self.data.ndim != 2:
            raise ValueError("DD grid must be 2-D")

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class TimeSignal:
    """Complex baseband samples of one OTFS frame (optionally CP-prefixed)."""

    samples: np.ndarray
    has_cp: bool
    sample_period: float

    def frame(self, cfg: GridConfig) -> np.ndarray:
        """The MN-sample frame block with any cyclic prefix removed."""
        expected = cfg.frame_samples + (cfg.N_cp if self.has_cp else 0)
        if self.samples.shape != (expected,):
            raise ValueError(f"expected {expected} samples, got {self.samples.shape}")
        return self.samples[cfg.N_cp :] if self.has_cp else self.samples


def _check_grid(X: np.ndarray, cfg: GridConfig) -> np.ndarray:
    X = X.data if hasattr(X, "role") else np.asarray(X)
    if X.shape != (cfg.M, cfg.N):
        raise ValueError(f"grid shape {X.shape} does not match ({cfg.M}, {cfg.N})")
    return X


def isfft(X_DD: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """DD -> TF: X_TF = F_M X_DD F_N^H with unitary DFT matrices."""
    X = _check_grid(X_DD, cfg)
    return np.fft.fft(np.fft.ifft(X, axis=1, norm="ortho"), axis=0, norm="ortho")


def sfft(Y_TF: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """TF -> DD: Y_DD = F_M^H Y_TF F_N; exact inverse of `isfft`."""
    Y = _check_grid(Y_TF, cfg)
    return np.fft.fft(np.fft.ifft(Y, axis=0, norm="ortho"), axis=1, norm="ortho")


def modulate(X_DD, cfg: GridConfig, add_cp: bool = True) -> TimeSignal:
    """Heisenberg path: s = vec(G_tx X_DD F_N^H), then prepend the CP."""
    X = _check_grid(X_DD, cfg)
    S = np.fft.ifft(X, axis=1, norm="ortho")  # G_tx = I
    s = S.reshape(-1, order="F")
    if add_cp and cfg.N_cp > 0:
        s = np.concatenate([s[-cfg.N_cp :], s])
    return TimeSignal(samples=s, has_cp=add_cp and cfg.N_cp > 0, sample_period=cfg.sample_period)


def demodulate(r: TimeSignal, cfg: GridConfig) -> DDGrid:
    """Wigner transform then SFFT back to the DD grid (CP stripped first)."""
    block = r.frame(cfg)
    R = block.reshape((cfg.M, cfg.N), order="F")
    Y_TF = np.fft.fft(R, axis=0, norm="ortho")  # G_rx = I
    Y_DD = sfft(Y_TF, cfg)
    return DDGrid(data=Y_DD, role="rx_symbols")


def fractional_delay(block: np.ndarray, delay_bins: float) -> np.ndarray:
    """Circular fractional delay by `delay_bins` samples via a DFT phase ramp."""
    L = block.shape[0]
    ramp = np.exp(-2j * np.pi * np.arange(L) * delay_bins / L)
    return np.fft.ifft(np.fft.fft(block) * ramp)


def apply_td_channel(s: TimeSignal, paths: PathSet, cfg: GridConfig) -> TimeSignal:
    """Apply the multipath channel sample-wise in the time domain.

    Per path: circular fractional delay of the CP-stripped frame block,
    then Doppler modulation exp(j 2 pi b n / MN) with n counted from the
    first post-CP sample.  The CP is rebuilt from the processed frame.
    """
    block = s.frame(cfg)
    L = block.shape[0]
    n = np.arange(L)
    out = np.zeros(L, dtype=complex)
    for p in paths.paths:
        delayed = fractional_delay(block, p.delay_bins)
        out += p.h * delayed * np.exp(2j * np.pi * p.doppler_bins * n / L)
    if s.has_cp:
        out = np.concatenate([out[-cfg.N_cp :], out]) if cfg.N_cp > 0 else out
    return TimeSignal(samples=out, has_cp=s.has_cp, sample_period=s.sample_period)


def dd_apply(
    H_DD: DDChannelMatrix,
    x_dd: np.ndarray,
    sigma: float,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """DD-domain linear model y = H x + w with w ~ CN(0, sigma^2 I)."""
    if sigma < 0:
        raise ValueError("noise std must be non-negative")
    y = H_DD.entries @ x_dd
    if sigma > 0:
        if rng is None:
            raise ValueError("an RNG is required when sigma > 0")
        w = (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)) * (
            sigma / np.sqrt(2.0)
        )
        y = y + w
    return y
