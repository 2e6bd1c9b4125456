"""Render sweep CSVs to figure files next to the delimited output."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

MARKERS = ["o", "s", "^", "v", "d", "x", "*", "+"]


def _read_rows(csv_path):
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def render_nmse_csv(csv_path, png_path=None) -> Path:
    """NMSE (dB) versus pilot SNR, one curve per estimator."""
    rows = _read_rows(csv_path)
    png_path = Path(png_path) if png_path else Path(csv_path).with_suffix(".png")
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    tags = sorted({r["estimator"] for r in rows})
    for i, tag in enumerate(tags):
        pts = sorted(
            (float(r["psnr_db"]), float(r["nmse"])) for r in rows if r["estimator"] == tag
        )
        x = [p for p, _ in pts]
        y = [10.0 * np.log10(max(v, 1e-30)) for _, v in pts]
        ax.plot(x, y, marker=MARKERS[i % len(MARKERS)], label=tag, linewidth=1.5)
    ax.set_xlabel("pilot SNR (dB)")
    ax.set_ylabel("NMSE (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return png_path


def render_ber_csv(csv_path, png_path=None) -> Path:
    """BER versus data SNR on a log scale, one curve per estimator."""
    rows = _read_rows(csv_path)
    png_path = Path(png_path) if png_path else Path(csv_path).with_suffix(".png")
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    tags = sorted({r["estimator"] for r in rows})
    floor = 1e-7
    for i, tag in enumerate(tags):
        pts = sorted(
            (float(r["data_snr_db"]), float(r["ber"]))
            for r in rows
            if r["estimator"] == tag and r["ber"] != ""
        )
        x = [p for p, _ in pts]
        y = [max(v, floor) for _, v in pts]
        ax.semilogy(x, y, marker=MARKERS[i % len(MARKERS)], label=tag, linewidth=1.5)
    ax.set_xlabel("data SNR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return png_path
