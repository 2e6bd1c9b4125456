"""Embedded-pilot frame layout, observation windows, and multi-frame snapshots.

The pilot impulse sits at DD bin (0, 0).  Because circular convolution
wraps the pilot response around the frame edges, guard bins occupy the
four corners (integer interference) plus delay- and Doppler-edge strips
(fractional leakage); everything else carriers data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridConfig

# delay back-margin of the observation window: two bins before l = 0 catch
# fractional back-leakage that wraps to l = M-1, M-2
WINDOW_DELAY_MARGIN = 2


@dataclass(frozen=True)
class FrameLayout:
    """Partition of the M x N grid into pilot, guard, and data bins."""

    cfg: GridConfig
    pilot_pos: tuple[int, int]
    pilot_amp: float
    guard_int: frozenset
    guard_tau: frozenset
    guard_nu: frozenset
    data_positions: tuple = field(repr=False)


def build_layout(cfg: GridConfig, sigma_p: float = 1.0) -> FrameLayout:
    """Classify every DD bin; guard strips follow the closed-form index sets.

    Boundary bins claimed by more than one closed-form guard set are
    assigned with precedence pilot > corner > Doppler strip > delay strip
    so the result is a disjoint cover of the grid.
    """
    if sigma_p <= 0:
        raise ValueError("pilot amplitude must be positive")
    M, N, Mt, Nn = cfg.M, cfg.N, cfg.M_tau, cfg.N_nu

    def in_l_corner(l):
        return l <= Mt - 1 or l >= M - Mt

    def in_k_corner(k):
        return k <= Nn - 1 or k >= N - Nn

    def in_l_mid(l):
        return Mt - 1 <= l <= M - Mt

    def in_k_mid(k):
        return Nn - 1 <= k <= N - Nn

    g_int, g_tau, g_nu, data = [], [], [], []
    for k in range(N):
        for l in range(M):
            if (l, k) == (0, 0):
                continue
            if in_l_corner(l) and in_k_corner(k):
                g_int.append((l, k))
            elif in_l_corner(l) and in_k_mid(k):
                g_nu.append((l, k))
            elif in_l_mid(l) and in_k_corner(k):
                g_tau.append((l, k))
            else:
                data.append((l, k))

    return FrameLayout(
        cfg=cfg,
        pilot_pos=(0, 0),
        pilot_amp=float(sigma_p),
        guard_int=frozenset(g_int),
        guard_tau=frozenset(g_tau),
        guard_nu=frozenset(g_nu),
        data_positions=tuple(data),
    )


def build_frame(layout: FrameLayout, data_symbols: np.ndarray):
    """Fill a DD frame: pilot impulse, zero guards, data in layout order."""
    from .modem import DDGrid

    data_symbols = np.asarray(data_symbols)
    if data_symbols.shape != (len(layout.data_positions),):
        raise ValueError(
            f"need {len(layout.data_positions)} data symbols, got {data_symbols.shape}"
        )
    X = np.zeros((layout.cfg.M, layout.cfg.N), dtype=complex)
    X[layout.pilot_pos] = layout.pilot_amp
    for sym, (l, k) in zip(data_symbols, layout.data_positions):
        X[l, k] = sym
    return DDGrid(data=X, role="tx_symbols")


def read_data_positions(X: np.ndarray, layout: FrameLayout) -> np.ndarray:
    """Read symbols back out of a frame in data_positions order."""
    return np.array([X[l, k] for (l, k) in layout.data_positions])


def window_index_map(cfg: GridConfig) -> tuple[np.ndarray, np.ndarray]:
    """Grid indices of the M_tau x N_nu observation window.

    Row u maps to delay bin (u - 2) mod M (two-bin back margin); column v
    maps to Doppler bin (v - N_nu/2) mod N (circularly centred at zero,
    Doppler being signed).
    """
    rows = np.array([(u - WINDOW_DELAY_MARGIN) % cfg.M for u in range(cfg.M_tau)])
    cols = np.array([(v - cfg.N_nu // 2) % cfg.N for v in range(cfg.N_nu)])
    return rows, cols


def window_anchor(cfg: GridConfig) -> tuple[int, int]:
    """Window coordinates (u, v) of DD bin (0, 0)."""
    return WINDOW_DELAY_MARGIN, cfg.N_nu // 2


def extract_observation(Y_DD, layout: FrameLayout, cfg: GridConfig) -> np.ndarray:
    """Pilot-normalized observation window Y[l(u), k(v)] / sigma_p."""
    if layout.pilot_amp == 0:
        raise ValueError("pilot amplitude is zero")
    data = Y_DD.data if hasattr(Y_DD, "role") else np.asarray(Y_DD)
    rows, cols = window_index_map(cfg)
    return data[np.ix_(rows, cols)] / layout.pilot_amp


@dataclass(frozen=True)
class SnapshotSet:
    """F noisy pilot-window observations of one fixed channel realization."""

    frames: np.ndarray  # (F, M_tau, N_nu) complex
    psnr_db: float
    channel_ref: str = ""

    def __post_init__(self):
        if self.frames.ndim != 3 or self.frames.shape[0] < 1:
            raise ValueError("need at least one frame of shape (F, M_tau, N_nu)")

    @property
    def F(self) -> int:
        return self.frames.shape[0]


def noise_std_from_psnr(psnr_db: float, sigma_p: float = 1.0) -> float:
    """Channel-noise std sigma with PSNR = sigma_p^2 / sigma^2."""
    if np.isinf(psnr_db):
        return 0.0
    return sigma_p * 10.0 ** (-psnr_db / 20.0)


def generate_snapshots(
    paths,
    cfg: GridConfig,
    psnr_db: float,
    rng: np.random.Generator,
    sigma_p: float = 1.0,
    channel_ref: str = "",
    h_window: np.ndarray | None = None,
) -> SnapshotSet:
    """F pilot observations of one channel; noise i.i.d. across frames.

    The channel is held fixed over all F frames (geometric coherence); only
    the additive noise varies.  Pass `h_window` to reuse a precomputed
    effective-channel window.
    """
    from .channel import effective_channel

    if h_window is None:
        h_window = effective_channel(paths, cfg, scope="window").window
    sigma = noise_std_from_psnr(psnr_db, sigma_p)
    shape = (cfg.F,) + h_window.shape
    noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * (
        sigma / np.sqrt(2.0) / sigma_p
    )
    return SnapshotSet(frames=h_window[None, :, :] + noise, psnr_db=psnr_db, channel_ref=channel_ref)


def average_frames(frames) -> np.ndarray:
    """Elementwise sample mean of equally shaped windows."""
    frames = np.asarray(frames)
    if frames.ndim < 3 or frames.shape[0] < 1:
        raise ValueError("need at least one frame")
    return frames.mean(axis=0)
