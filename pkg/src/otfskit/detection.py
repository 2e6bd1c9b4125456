"""Full-channel assembly, MMSE equalization, BPSK demapping, and metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import DDChannelMatrix, build_hdd, embed_window
from .grid import GridConfig


@dataclass(frozen=True)
class DetectionResult:
    symbols_hat: np.ndarray
    bits_hat: np.ndarray
    ser: float
    ber: float

    def __post_init__(self):
        if not (0.0 <= self.ser <= 1.0 and 0.0 <= self.ber <= 1.0):
            raise ValueError("error rates must lie in [0, 1]")


@dataclass(frozen=True)
class MetricRecord:
    """One averaged sweep measurement, serialized as a CSV row."""

    estimator_tag: str
    psnr_db: float
    data_snr_db: float | None
    nmse: float
    ber: float | None
    trials: int

    def __post_init__(self):
        if self.nmse < 0 or self.trials < 1:
            raise ValueError("nmse must be >= 0 and trials >= 1")


def assemble_full_estimate(window, cfg: GridConfig) -> DDChannelMatrix:
    """Embed an estimated window at the observation indices, then build the
    2-D circulant DD channel matrix from it."""
    win = getattr(window, "window", window)
    return build_hdd(embed_window(win, cfg), cfg)


def mmse_detect(
    y_dd: np.ndarray,
    H_hat: DDChannelMatrix,
    sigma_sq: float,
    sigma_d_sq: float = 1.0,
) -> np.ndarray:
    """Regularized linear MMSE equalizer.

    Solves (H^H H + (sigma^2/sigma_d^2) I) x = H^H y with a dense
    factorization; no explicit inverse.  With unit noise power this is the
    classical (H^H H + I/sigma_d^2)^{-1} H^H y detector.
    """
    if sigma_d_sq <= 0:
        raise ValueError("data power must be positive")
    H = H_hat.entries
    if not (np.isfinite(H).all() and np.isfinite(y_dd).all()):
        raise np.linalg.LinAlgError("non-finite inputs to MMSE solve")
    gram = H.conj().T @ H
    reg = sigma_sq / sigma_d_sq
    gram[np.diag_indices_from(gram)] += reg
    rhs = H.conj().T @ y_dd
    if reg == 0.0:
        # least-squares limit; Gram may be singular for rank-deficient H
        sol, *_ = np.linalg.lstsq(H, y_dd, rcond=None)
        return sol
    return np.linalg.solve(gram, rhs)


def demap_bpsk(symbols_hat: np.ndarray, bits_true: np.ndarray) -> DetectionResult:
    """Hard BPSK decisions: bit = 1 iff Re > 0 (exactly 0 maps to bit 0)."""
    symbols_hat = np.asarray(symbols_hat)
    bits_true = np.asarray(bits_true)
    if symbols_hat.shape != bits_true.shape:
        raise ValueError("symbol and bit vectors must align")
    bits_hat = (symbols_hat.real > 0).astype(np.uint8)
    errors = int(np.count_nonzero(bits_hat != bits_true))
    rate = errors / bits_true.size if bits_true.size else 0.0
    return DetectionResult(symbols_hat=symbols_hat, bits_hat=bits_hat, ser=rate, ber=rate)


def bpsk_symbols(bits: np.ndarray) -> np.ndarray:
    """Unit-power BPSK mapping 0 -> -1, 1 -> +1."""
    return 2.0 * np.asarray(bits, dtype=float) - 1.0 + 0j


def nmse(H_hat, H_true) -> float:
    """Normalized mean-squared error ||H_hat - H||^2 / ||H||^2."""
    A = np.asarray(getattr(H_hat, "entries", getattr(H_hat, "window", H_hat)))
    B = np.asarray(getattr(H_true, "entries", getattr(H_true, "window", H_true)))
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    denom = np.sum(np.abs(B) ** 2)
    if denom == 0:
        raise ValueError("reference channel has zero energy")
    return float(np.sum(np.abs(A - B) ** 2) / denom)
