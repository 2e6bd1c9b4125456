"""Shared helpers: datasets come from the inference CLI (external interface)."""

import json
import subprocess
import sys
from pathlib import Path

import pytest


def run_cli(*args):
    """Invoke the inference-side CLI in a subprocess."""
    proc = subprocess.run(
        [sys.executable, "-m", "otfskit.cli", *map(str, args)],
        capture_output=True,
        text=True,
    )
    return proc


def make_datasets(tmp_dir, psnrs, records, seed, fractional="fdfd", extra_grid=None):
    """Write an experiment config and export DDDS files through the CLI."""
    tmp_dir = Path(tmp_dir)
    tmp_dir.mkdir(parents=True, exist_ok=True)
    grid = {"M": 32, "N": 32, "M_tau": 8, "N_nu": 8, "F": 5}
    if extra_grid:
        grid.update(extra_grid)
    cfg = {
        "grid": grid,
        "channel": {"P": 5, "fractional": fractional},
        "seed": seed,
        "dataset": {"snapshots_per_psnr": records, "split_ratio": [0.6, 0.2, 0.2]},
    }
    cfg_path = tmp_dir / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    proc = run_cli("make-dataset", "--config", cfg_path, "--out-dir", tmp_dir,
                   "--psnr-db", *[f"{p:g}" for p in psnrs])
    assert proc.returncode == 0, proc.stderr
    return [tmp_dir / f"snapshots_psnr{p:g}db.ddds" for p in psnrs]


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("ddds")
