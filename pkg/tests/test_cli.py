"""End-to-end CLI tests (in-process via main)."""

import json

import numpy as np
import pytest

from otfskit.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main


@pytest.fixture
def config_path(tmp_path):
    cfg = {
        "grid": {"M": 16, "N": 16, "M_tau": 4, "N_nu": 4, "F": 3},
        "channel": {"P": 3},
        "psnr_grid_db": [10, 20],
        "data_snr_grid_db": [10, 20],
        "trials": 3,
        "estimators": ["raw", "avg", "threshold", "omp"],
        "seed": 5,
        "dataset": {"snapshots_per_psnr": 4, "split_ratio": [0.6, 0.2, 0.2]},
    }
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return p


def test_physics_prints_report(config_path, capsys):
    assert main(["physics", "--config", str(config_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "frame duration" in out
    assert "snapshot span" in out


def test_usage_error_exit_code(capsys):
    assert main(["physics"]) == EXIT_USAGE
    assert main(["no-such-command"]) == EXIT_USAGE


def test_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["physics", "--config", str(bad)]) == EXIT_CONFIG
    assert main(["physics", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_nmse_sweep_writes_csv_and_figure(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["nmse-sweep", "--config", str(config_path), "--out-dir", str(out)]) == EXIT_OK
    csv_path = out / "nmse_sweep.csv"
    assert csv_path.exists()
    assert (out / "nmse_sweep.png").exists()
    header = csv_path.read_text().splitlines()[0]
    assert header == "estimator,psnr_db,data_snr_db,nmse,ber,trials"


def test_nmse_sweep_estimator_subset_and_determinism(config_path, tmp_path):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    args = ["nmse-sweep", "--config", str(config_path), "--estimators", "raw,avg",
            "--no-plot"]
    assert main(args + ["--out-dir", str(out1)]) == EXIT_OK
    assert main(args + ["--out-dir", str(out2)]) == EXIT_OK
    b1 = (out1 / "nmse_sweep.csv").read_bytes()
    b2 = (out2 / "nmse_sweep.csv").read_bytes()
    assert b1 == b2
    body = b1.decode().splitlines()[1:]
    assert all(line.split(",")[0] in ("raw-single", "raw-avg") for line in body)


def test_seed_override_changes_output(config_path, tmp_path):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    base = ["nmse-sweep", "--config", str(config_path), "--no-plot"]
    assert main(base + ["--out-dir", str(out1)]) == EXIT_OK
    assert main(base + ["--out-dir", str(out2), "--seed", "99"]) == EXIT_OK
    assert (out1 / "nmse_sweep.csv").read_text() != (out2 / "nmse_sweep.csv").read_text()


def test_ber_sweep_runs(config_path, tmp_path):
    out = tmp_path / "ber"
    rc = main(["ber-sweep", "--config", str(config_path), "--out-dir", str(out),
               "--estimator", "perfect", "--psnr-db", "25"])
    assert rc == EXIT_OK
    csv_path = out / "ber_sweep_perfect-csi.csv"
    assert csv_path.exists()
    assert (out / "ber_sweep_perfect-csi.png").exists()


def test_make_dataset_and_infer_round_trip(config_path, tmp_path):
    out = tmp_path / "ds"
    rc = main(["make-dataset", "--config", str(config_path), "--out-dir", str(out),
               "--psnr-db", "10", "--channels-out", str(out / "channels.jsonl")])
    assert rc == EXIT_OK
    ds_path = out / "snapshots_psnr10db.ddds"
    assert ds_path.exists()
    lines = (out / "channels.jsonl").read_text().splitlines()
    assert len(lines) == 4
    assert "paths" in json.loads(lines[0])

    # run the denoiser over the exported windows
    from otfskit.denoiser import random_model
    from otfskit.weights import save_model

    wpath = tmp_path / "m.ddnw"
    save_model(random_model(4, 1, np.random.default_rng(0)), wpath)
    out_pv = tmp_path / "out.ddpv"
    rc = main(["infer", "--weights", str(wpath), "--dataset", str(ds_path),
               "--out", str(out_pv)])
    assert rc == EXIT_OK
    from otfskit.datasets import read_parity

    inputs, outputs = read_parity(out_pv)
    assert inputs.shape == (4 * 3, 4, 4)


def test_infer_parity_verification(tmp_path):
    from otfskit.datasets import write_parity
    from otfskit.denoiser import denoise_window, random_model
    from otfskit.weights import save_model

    model = random_model(4, 1, np.random.default_rng(1))
    wpath = tmp_path / "m.ddnw"
    save_model(model, wpath)
    rng = np.random.default_rng(2)
    inputs = (rng.standard_normal((8, 4, 4)) + 1j * rng.standard_normal((8, 4, 4))).astype(
        np.complex64
    )
    outputs = np.stack([denoise_window(model, w.astype(complex)) for w in inputs]).astype(
        np.complex64
    )
    good = tmp_path / "good.ddpv"
    write_parity(good, inputs, outputs)
    assert main(["infer", "--weights", str(wpath), "--parity", str(good)]) == EXIT_OK

    bad = tmp_path / "bad.ddpv"
    write_parity(bad, inputs, outputs + np.complex64(0.01))
    assert main(["infer", "--weights", str(wpath), "--parity", str(bad)]) == EXIT_NUMERIC


def test_missing_weights_is_io_error(tmp_path, config_path):
    rc = main(["infer", "--weights", str(tmp_path / "none.ddnw"),
               "--parity", str(tmp_path / "none.ddpv")])
    assert rc == EXIT_IO


def test_selftest_passes(capsys):
    assert main(["selftest"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out
