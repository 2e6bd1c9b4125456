"""OTFS grid geometry and delay-Doppler path sets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

GAIN_PROFILES = ("equal", "exp")


@dataclass(frozen=True)
class GridConfig:
    """Geometry and physical parameters of one OTFS frame.

    M, N         delay / Doppler bins of the DD grid
    delta_f      subcarrier spacing in Hz
    f_c          carrier frequency in Hz
    M_tau, N_nu  maximum delay / Doppler spread of the channel, in bins
    N_cp         cyclic-prefix length in samples (defaults to M_tau)
    F            number of pilot snapshots averaged per channel realization
    """

    M: int = 32
    N: int = 32
    delta_f: float = 15e3
    f_c: float = 4e9
    M_tau: int = 8
    N_nu: int = 8
    N_cp: int = -1
    F: int = 5

    def __post_init__(self):
        if self.N_cp < 0:
            object.__setattr__(self, "N_cp", self.M_tau)
        for name in ("M", "N", "M_tau", "N_nu", "N_cp", "F"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < (0 if name == "N_cp" else 1):
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.delta_f <= 0 or self.f_c <= 0:
            raise ValueError("delta_f and f_c must be positive")
        if self.M < 2 * self.M_tau or self.N < 2 * self.N_nu:
            raise ValueError("guard regions need M >= 2*M_tau and N >= 2*N_nu")
        if self.N_cp < self.M_tau - 1:
            raise ValueError("cyclic prefix must cover the maximum delay spread")

    @property
    def T(self) -> float:
        """Symbol duration 1/delta_f in seconds."""
        return 1.0 / self.delta_f

    @property
    def T_f(self) -> float:
        """Frame duration N*T in seconds."""
        return self.N * self.T

    @property
    def bandwidth(self) -> float:
        return self.M * self.delta_f

    @property
    def delay_resolution(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def doppler_resolution(self) -> float:
        return 1.0 / self.T_f

    @property
    def frame_samples(self) -> int:
        return self.M * self.N

    @property
    def sample_period(self) -> float:
        return self.T / self.M


@dataclass(frozen=True)
class PathSpec:
    """One propagation path: complex gain plus integer+fractional DD indices."""

    h: complex
    l_int: int
    iota: float
    k_int: int
    kappa: float

    @property
    def delay_bins(self) -> float:
        """Total delay in (fractional) delay bins, tau_p * B."""
        return self.l_int + self.iota

    @property
    def doppler_bins(self) -> float:
        """Total Doppler in (fractional) Doppler bins, nu_p * T_f."""
        return self.k_int + self.kappa


@dataclass(frozen=True)
class PathSet:
    """A multipath DD channel realization with P paths."""

    paths: tuple[PathSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        keys = [(p.l_int, p.k_int) for p in self.paths]
        if len(set(keys)) != len(keys):
            raise ValueError("integer (l, k) tap pairs must be distinct")
        for p in self.paths:
            if not (-0.5 < p.iota < 0.5) or not (-0.5 < p.kappa < 0.5):
                raise ValueError("fractional offsets must lie in (-0.5, 0.5)")

    def __len__(self) -> int:
        return len(self.paths)

    def gains(self) -> np.ndarray:
        return np.array([p.h for p in self.paths], dtype=complex)

    def delays(self) -> np.ndarray:
        return np.array([p.delay_bins for p in self.paths], dtype=float)

    def dopplers(self) -> np.ndarray:
        return np.array([p.doppler_bins for p in self.paths], dtype=float)

    def validate_support(self, cfg: GridConfig) -> None:
        """Reject taps whose integer indices leave the M_tau x N_nu spread."""
        k_half = cfg.N_nu // 2
        for p in self.paths:
            if not 0 <= p.l_int <= cfg.M_tau - 2:
                raise ValueError(f"l_int={p.l_int} outside [0, {cfg.M_tau - 2}]")
            if not -(k_half - 1) <= p.k_int <= k_half - 1:
                raise ValueError(f"k_int={p.k_int} outside [{-(k_half - 1)}, {k_half - 1}]")

    def to_json(self) -> str:
        recs = [
            {
                "h_re": p.h.real,
                "h_im": p.h.imag,
                "l_int": p.l_int,
                "iota": p.iota,
                "k_int": p.k_int,
                "kappa": p.kappa,
            }
            for p in self.paths
        ]
        return json.dumps({"paths": recs})

    @classmethod
    def from_json(cls, text: str) -> "PathSet":
        obj = json.loads(text)
        paths = tuple(
            PathSpec(
                h=complex(r["h_re"], r["h_im"]),
                l_int=int(r["l_int"]),
                iota=float(r["iota"]),
                k_int=int(r["k_int"]),
                kappa=float(r["kappa"]),
            )
            for r in obj["paths"]
        )
        return cls(paths)


def sample_paths(
    cfg: GridConfig,
    P: int,
    rng: np.random.Generator,
    fractional: str = "fdfd",
    gain_profile: str = "equal",
) -> PathSet:
    """Draw a random P-path channel realization.

    Integer taps are drawn without replacement so all (l, k) pairs are
    distinct and the spread stays inside the M_tau x N_nu support.
    `fractional` selects the off-grid model: "integer" (none),
    "doppler" (fractional Doppler only), or "fdfd" (both axes).
    """
    if fractional not in ("integer", "doppler", "fdfd"):
        raise ValueError(f"unknown fractional mode {fractional!r}")
    if gain_profile not in GAIN_PROFILES:
        raise ValueError(f"unknown gain profile {gain_profile!r}")
    k_half = cfg.N_nu // 2
    l_choices = cfg.M_tau - 1
    k_choices = 2 * (k_half - 1) + 1
    if P > min(l_choices, k_choices):
        raise ValueError(f"P={P} exceeds available distinct taps")

    l_int = rng.choice(l_choices, size=P, replace=False)
    k_int = rng.choice(np.arange(-(k_half - 1), k_half), size=P, replace=False)
    if fractional == "fdfd":
        iota = rng.uniform(-0.5, 0.5, size=P)
    else:
        iota = np.zeros(P)
    if fractional in ("fdfd", "doppler"):
        kappa = rng.uniform(-0.5, 0.5, size=P)
    else:
        kappa = np.zeros(P)
    # keep offsets strictly inside the open interval
    eps = np.nextafter(-0.5, 0.0)
    iota = np.maximum(iota, eps)
    kappa = np.maximum(kappa, eps)

    if gain_profile == "equal":
        powers = np.full(P, 1.0 / P)
    else:  # exponential decay, unit total average power
        w = np.exp(-np.arange(P, dtype=float))
        powers = w / w.sum()
    h = (rng.standard_normal(P) + 1j * rng.standard_normal(P)) * np.sqrt(powers / 2.0)

    return PathSet(
        tuple(
            PathSpec(complex(h[p]), int(l_int[p]), float(iota[p]), int(k_int[p]), float(kappa[p]))
            for p in range(P)
        )
    )
