"""Derived timing, resolution, and mobility figures for a configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import GridConfig

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class PhysicsReport:
    T_s: float
    T_f_s: float
    delay_resolution_s: float
    doppler_resolution_hz: float
    nu_max_hz: float
    k_max: int
    coherence_span_ms: float
    displacement_m: float
    doppler_span_ok: bool

    def lines(self) -> list[str]:
        mark = "within" if self.doppler_span_ok else "EXCEEDS"
        return [
            f"symbol duration T          : {self.T_s * 1e6:.4f} us",
            f"frame duration T_f         : {self.T_f_s * 1e3:.4f} ms",
            f"delay resolution           : {self.delay_resolution_s * 1e9:.4f} ns",
            f"Doppler resolution         : {self.doppler_resolution_hz:.4f} Hz",
            f"max Doppler shift nu_max   : {self.nu_max_hz:.4f} Hz",
            f"max Doppler index k_max    : {self.k_max}",
            f"snapshot span F*T_f        : {self.coherence_span_ms:.4f} ms",
            f"max displacement over span : {self.displacement_m:.4f} m",
            f"Doppler span check         : k_max={self.k_max} {mark} one-sided N_nu/2",
        ]


def derive_physics(cfg: GridConfig, v_max_kmh: float) -> PhysicsReport:
    """Timing/mobility arithmetic; flags the k_max vs N_nu/2 margin.

    The one-sided Doppler span implied by v_max can exceed the configured
    N_nu/2 support; the report surfaces both instead of forcing agreement.
    """
    v = v_max_kmh / 3.6
    nu_max = cfg.f_c * v / SPEED_OF_LIGHT
    k_max = math.ceil(nu_max / cfg.doppler_resolution)
    span = cfg.F * cfg.T_f
    return PhysicsReport(
        T_s=cfg.T,
        T_f_s=cfg.T_f,
        delay_resolution_s=cfg.delay_resolution,
        doppler_resolution_hz=cfg.doppler_resolution,
        nu_max_hz=nu_max,
        k_max=k_max,
        coherence_span_ms=span * 1e3,
        displacement_m=v * span,
        doppler_span_ok=k_max <= cfg.N_nu // 2,
    )
