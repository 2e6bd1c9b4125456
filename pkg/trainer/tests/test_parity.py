"""Cross-component parity vectors (DDPV)."""

import struct

import numpy as np
import torch

from conftest import run_cli
from ddtrainer.model import GatedDenoiser
from ddtrainer.train import emit_parity_vectors
from ddtrainer.weights import export_weights

torch.set_num_threads(1)


def test_parity_file_layout(tmp_path):
    torch.manual_seed(0)
    model = GatedDenoiser(4, 1)
    p = tmp_path / "p.ddpv"
    emit_parity_vectors(model, 16, p, seed=1)
    blob = p.read_bytes()
    magic, version, count, Mt, Nn = struct.unpack_from("<4sIIII", blob, 0)
    assert magic == b"DDPV" and version == 1
    assert count == 16 and Mt == 8 and Nn == 8
    assert len(blob) == 20 + 16 * 2 * 2 * 64 * 4


def test_zero_model_emits_zero_outputs(tmp_path):
    model = GatedDenoiser(4, 1, identity_init=False)
    with torch.no_grad():
        for param in model.parameters():
            param.zero_()
    p = tmp_path / "z.ddpv"
    emit_parity_vectors(model, 4, p, seed=2)
    raw = np.frombuffer(p.read_bytes(), dtype="<f4", offset=20).reshape(4, 2, 2, 64)
    outputs = raw[:, 1]
    assert np.all(outputs == 0)
    assert np.any(raw[:, 0] != 0)


def test_primary_inference_reproduces_parity_outputs(tmp_path):
    torch.manual_seed(3)
    model = GatedDenoiser(13, 4)
    weights = tmp_path / "m.ddnw"
    parity = tmp_path / "m.ddpv"
    export_weights(model, weights)
    emit_parity_vectors(model, 16, parity, seed=4)
    proc = run_cli("infer", "--weights", weights, "--parity", parity, "--tol", "1e-5")
    assert proc.returncode == 0, proc.stderr
    assert "parity max-abs deviation" in proc.stdout
