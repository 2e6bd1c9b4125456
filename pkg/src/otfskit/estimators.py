"""Channel estimators operating on pilot observation windows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .denoiser import DenoiserModel, denoise_window
from .frames import SnapshotSet, average_frames
from .weights import load_model  # noqa: F401  (re-exported entry point)


@dataclass(frozen=True)
class WindowEstimate:
    """An estimated channel window plus the estimator that produced it."""

    window: np.ndarray
    estimator_tag: str

    def __post_init__(self):
        if not np.isfinite(self.window).all():
            raise ValueError("estimate contains non-finite entries")


def threshold_estimate(Z: np.ndarray, sigma: float, gamma: float = 3.0) -> WindowEstimate:
    """Keep entries with |Z| >= gamma * sigma, zero the rest.

    `sigma` is the noise std after pilot normalization (sqrt(E|V|^2)/sigma_p).
    """
    if sigma < 0 or gamma < 0:
        raise ValueError("sigma and gamma must be non-negative")
    kept = np.where(np.abs(Z) >= gamma * sigma, Z, 0.0)
    return WindowEstimate(window=kept, estimator_tag="threshold")


def omp_estimate(
    Z: np.ndarray,
    max_atoms: int = 5,
    residual_tol: float = 1e-9,
) -> WindowEstimate:
    """Orthogonal matching pursuit over the integer-grid delta dictionary.

    Atoms are the canonical basis vectors e_{u,v} of the window, i.e. the
    coarse on-grid sparsity model; fractional leakage is deliberately not
    in the dictionary.
    """
    if max_atoms < 1:
        raise ValueError("max_atoms must be >= 1")
    z = Z.reshape(-1)
    n = z.size
    dictionary = np.eye(n, dtype=complex)
    z_norm = np.linalg.norm(z)
    est = np.zeros(n, dtype=complex)
    if z_norm == 0:
        return WindowEstimate(window=est.reshape(Z.shape), estimator_tag="omp")

    support: list[int] = []
    residual = z.copy()
    for _ in range(min(max_atoms, n)):
        scores = np.abs(dictionary.conj().T @ residual)
        scores[support] = -1.0
        support.append(int(np.argmax(scores)))
        atoms = dictionary[:, support]
        coef, *_ = np.linalg.lstsq(atoms, z, rcond=None)
        residual = z - atoms @ coef
        if np.linalg.norm(residual) <= residual_tol * z_norm:
            break
    est[support] = coef
    return WindowEstimate(window=est.reshape(Z.shape), estimator_tag="omp")


def denoise(model: DenoiserModel, Z: np.ndarray) -> WindowEstimate:
    """Single-window forward pass through the gated residual denoiser."""
    return WindowEstimate(window=denoise_window(model, Z), estimator_tag="denoised")


def multi_frame_estimate(model: DenoiserModel, snapshots: SnapshotSet) -> WindowEstimate:
    """Denoise each frame independently, then average the outputs."""
    outs = [denoise_window(model, frame) for frame in snapshots.frames]
    return WindowEstimate(window=average_frames(outs), estimator_tag="denoised-avg")
