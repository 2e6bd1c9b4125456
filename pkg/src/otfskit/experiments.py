"""Seeded Monte-Carlo sweeps, dataset export, and CSV emission.

Every trial draws from its own (seed, trial, role) child stream, so sweep
results are reproducible byte-for-byte regardless of scheduling.  Trials
are merged in trial-index order.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import rng as rngmod
from .channel import build_hdd, effective_channel, effective_full_grid
from .config import LEARNED_TAGS, ExperimentConfig
from .datasets import write_dataset
from .denoiser import DenoiserModel
from .detection import (
    MetricRecord,
    assemble_full_estimate,
    bpsk_symbols,
    demap_bpsk,
    mmse_detect,
    nmse,
)
from .estimators import (
    WindowEstimate,
    denoise,
    multi_frame_estimate,
    omp_estimate,
    threshold_estimate,
)
from .frames import (
    SnapshotSet,
    average_frames,
    build_frame,
    build_layout,
    generate_snapshots,
    noise_std_from_psnr,
    read_data_positions,
)
from .grid import sample_paths
from .modem import dd_apply

CSV_HEADER = "estimator,psnr_db,data_snr_db,nmse,ber,trials"


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.10g}"


def records_to_csv(records: list[MetricRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    r.estimator_tag,
                    _fmt(r.psnr_db),
                    _fmt(r.data_snr_db),
                    _fmt(r.nmse),
                    _fmt(r.ber),
                    str(r.trials),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_csv(records: list[MetricRecord], path) -> None:
    Path(path).write_text(records_to_csv(records))


def estimate_window(
    tag: str,
    snapshots: SnapshotSet,
    cfg: ExperimentConfig,
    model: DenoiserModel | None = None,
) -> WindowEstimate:
    """Dispatch one estimator tag on a snapshot set."""
    frames = snapshots.frames
    if tag == "raw-single":
        return WindowEstimate(window=frames[0], estimator_tag=tag)
    if tag == "raw-avg":
        return WindowEstimate(window=average_frames(frames), estimator_tag=tag)
    if tag == "threshold":
        sigma_norm = noise_std_from_psnr(snapshots.psnr_db, cfg.sigma_p) / cfg.sigma_p
        return threshold_estimate(frames[0], sigma=sigma_norm, gamma=cfg.gamma)
    if tag == "omp":
        return omp_estimate(frames[0], max_atoms=cfg.max_atoms)
    if tag == "denoised-single":
        return denoise(model, frames[0])
    if tag == "denoised-avg":
        return multi_frame_estimate(model, snapshots)
    raise ValueError(f"unknown estimator tag {tag!r}")


def _require_model(cfg: ExperimentConfig, tags) -> DenoiserModel | None:
    if not any(t in LEARNED_TAGS for t in tags):
        return None
    if not cfg.weights:
        raise FileNotFoundError("learned estimator tags need a 'weights' path in the config")
    from .weights import load_model

    return load_model(cfg.weights)


def run_nmse_sweep(cfg: ExperimentConfig) -> list[MetricRecord]:
    """Average window-level NMSE per (PSNR, estimator) over seeded trials."""
    model = _require_model(cfg, cfg.estimators)
    records = []
    for pi, psnr_db in enumerate(cfg.psnr_grid_db):
        sums = {tag: 0.0 for tag in cfg.estimators}
        for trial in range(cfg.trials):
            cell = pi * cfg.trials + trial
            ch_rng = rngmod.stream(cfg.seed, cell, rngmod.ROLE_CHANNEL)
            noise_rng = rngmod.stream(cfg.seed, cell, rngmod.ROLE_NOISE)
            paths = sample_paths(
                cfg.grid, cfg.P, ch_rng, fractional=cfg.fractional, gain_profile=cfg.gain_profile
            )
            h_win = effective_channel(paths, cfg.grid, scope="window").window
            snaps = generate_snapshots(
                paths, cfg.grid, psnr_db, noise_rng, sigma_p=cfg.sigma_p, h_window=h_win
            )
            for tag in cfg.estimators:
                est = estimate_window(tag, snaps, cfg, model)
                sums[tag] += nmse(est.window, h_win)
        for tag in cfg.estimators:
            records.append(
                MetricRecord(
                    estimator_tag=tag,
                    psnr_db=psnr_db,
                    data_snr_db=None,
                    nmse=sums[tag] / cfg.trials,
                    ber=None,
                    trials=cfg.trials,
                )
            )
    return records


def run_ber_sweep(
    cfg: ExperimentConfig,
    estimator_tag: str,
    fixed_psnr_db: float = 25.0,
) -> list[MetricRecord]:
    """BER vs data SNR with the channel estimated at a fixed pilot SNR.

    Per trial: one channel realization, F pilot snapshots for estimation,
    one BPSK data frame through the DD linear model, full-vector MMSE
    equalization, then hard demapping over the data positions.  Trials
    reuse the same child streams at every SNR point (common random
    numbers), so curves are smooth in the sweep variable.
    """
    model = _require_model(cfg, [estimator_tag]) if estimator_tag != "perfect-csi" else None
    layout = build_layout(cfg.grid, cfg.sigma_p)
    n_data = len(layout.data_positions)
    records = []
    for snr_db in cfg.data_snr_grid_db:
        sigma_sq = 10.0 ** (-snr_db / 10.0)  # unit-power data symbols
        bit_errors = 0
        bit_total = 0
        nmse_sum = 0.0
        for trial in range(cfg.trials):
            ch_rng = rngmod.stream(cfg.seed, trial, rngmod.ROLE_CHANNEL)
            noise_rng = rngmod.stream(cfg.seed, trial, rngmod.ROLE_NOISE)
            data_rng = rngmod.stream(cfg.seed, trial, rngmod.ROLE_DATA)
            paths = sample_paths(
                cfg.grid, cfg.P, ch_rng, fractional=cfg.fractional, gain_profile=cfg.gain_profile
            )
            h_full = effective_full_grid(paths, cfg.grid)
            H_true = build_hdd(h_full, cfg.grid)

            if estimator_tag == "perfect-csi":
                H_hat = H_true
                nmse_sum += 0.0
            else:
                snaps = generate_snapshots(
                    paths, cfg.grid, fixed_psnr_db, noise_rng, sigma_p=cfg.sigma_p
                )
                est = estimate_window(estimator_tag, snaps, cfg, model)
                rows_cols_true = effective_channel(paths, cfg.grid, scope="window").window
                nmse_sum += nmse(est.window, rows_cols_true)
                H_hat = assemble_full_estimate(est, cfg.grid)

            bits = data_rng.integers(0, 2, size=n_data)
            frame = build_frame(layout, bpsk_symbols(bits))
            x = frame.data.reshape(-1, order="F")
            y = dd_apply(H_true, x, sigma=np.sqrt(sigma_sq), rng=noise_rng)
            x_hat_full = mmse_detect(y, H_hat, sigma_sq=sigma_sq, sigma_d_sq=1.0)
            X_hat = x_hat_full.reshape((cfg.grid.M, cfg.grid.N), order="F")
            data_hat = read_data_positions(X_hat, layout)
            res = demap_bpsk(data_hat, bits)
            bit_errors += int(np.count_nonzero(res.bits_hat != bits))
            bit_total += n_data
        records.append(
            MetricRecord(
                estimator_tag=estimator_tag,
                psnr_db=fixed_psnr_db,
                data_snr_db=snr_db,
                nmse=nmse_sum / cfg.trials,
                ber=bit_errors / bit_total,
                trials=cfg.trials,
            )
        )
    return records


def export_dataset(cfg: ExperimentConfig, psnr_db: float, out_path) -> None:
    """Write `snapshots_per_psnr` fresh channel records to a DDDS file."""
    R = cfg.snapshots_per_psnr
    grid = cfg.grid
    noisy = np.empty((R, grid.F, grid.M_tau, grid.N_nu), dtype=np.complex64)
    clean = np.empty((R, grid.M_tau, grid.N_nu), dtype=np.complex64)
    ch_role = f"{rngmod.ROLE_DATASET}-channel-{psnr_db:g}"
    nz_role = f"{rngmod.ROLE_DATASET}-noise-{psnr_db:g}"
    for r in range(R):
        paths = sample_paths(
            grid, cfg.P, rngmod.stream(cfg.seed, r, ch_role),
            fractional=cfg.fractional, gain_profile=cfg.gain_profile,
        )
        h_win = effective_channel(paths, grid, scope="window").window
        snaps = generate_snapshots(
            paths, grid, psnr_db, rngmod.stream(cfg.seed, r, nz_role),
            sigma_p=cfg.sigma_p, h_window=h_win,
        )
        noisy[r] = snaps.frames
        clean[r] = h_win
    write_dataset(out_path, noisy, clean, psnr_db)
