"""Denoiser forward-pass tests against a straight-loop oracle."""

import numpy as np
import pytest

from otfskit.denoiser import (
    BLOCK_LAYERS,
    KIND_CONV1X1,
    KIND_CONV3X3,
    KIND_LAYERNORM,
    KIND_PROJECTION,
    DenoiserModel,
    Layer,
    ModelShapeError,
    denoise_window,
    layer_count,
    layer_plan,
    random_model,
    reference_param_count,
    validate_model,
    zero_model,
)


def conv_loop(weight, bias, x):
    """Naive nested-loop convolution oracle (zero padding, stride 1)."""
    out_ch, in_ch, kh, kw = weight.shape
    C, H, W = x.shape
    pad = kh // 2
    out = np.zeros((out_ch, H, W), dtype=np.float64)
    for o in range(out_ch):
        for yy in range(H):
            for xx in range(W):
                acc = float(bias[o])
                for c in range(in_ch):
                    for dy in range(kh):
                        for dx in range(kw):
                            sy, sx = yy + dy - pad, xx + dx - pad
                            if 0 <= sy < H and 0 <= sx < W:
                                acc += float(weight[o, c, dy, dx]) * float(x[c, sy, sx])
                out[o, yy, xx] = acc
    return out


def layernorm_loop(scale, shift, x, eps=1e-6):
    C, H, W = x.shape
    out = np.zeros_like(x, dtype=np.float64)
    for yy in range(H):
        for xx in range(W):
            col = x[:, yy, xx].astype(np.float64)
            mu = col.mean()
            var = ((col - mu) ** 2).mean()
            out[:, yy, xx] = (col - mu) / np.sqrt(var + eps) * scale + shift
    return out


def forward_loop(model, Z):
    """Independent straight-loop forward pass of the whole network."""
    x = np.stack([Z.real, Z.imag]).astype(np.float64)
    layers = model.layers
    x = conv_loop(layers[0].weight, layers[0].bias, x)
    idx = 1
    for _ in range(model.blocks):
        a = conv_loop(layers[idx].weight, layers[idx].bias, x)
        u = conv_loop(layers[idx + 1].weight, layers[idx + 1].bias, x)
        u = conv_loop(layers[idx + 2].weight, layers[idx + 2].bias, u)
        u = layernorm_loop(layers[idx + 3].ln_scale, layers[idx + 3].ln_shift, u)
        v = conv_loop(layers[idx + 4].weight, layers[idx + 4].bias, x)
        v = conv_loop(layers[idx + 5].weight, layers[idx + 5].bias, v)
        v = layernorm_loop(layers[idx + 6].ln_scale, layers[idx + 6].ln_shift, v)
        x = a + u * v
        idx += BLOCK_LAYERS
    x = conv_loop(layers[idx].weight, layers[idx].bias, x)
    x = conv_loop(layers[idx + 1].weight, layers[idx + 1].bias, x)
    return x[0] + 1j * x[1]


def test_zero_model_annihilates():
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    assert np.all(denoise_window(zero_model(5, 2), Z) == 0)


def test_gate_annihilator_reduces_to_stem_tail():
    """Zeroing every V pipeline zeroes the gate, leaving residual A chains."""
    rng = np.random.default_rng(1)
    model = random_model(4, 2, rng)
    layers = list(model.layers)
    for b in range(model.blocks):
        base = 1 + b * BLOCK_LAYERS
        # skip conv A -> identity, V pipeline -> all zero
        eye = np.zeros_like(layers[base].weight)
        for c in range(model.width):
            eye[c, c, 0, 0] = 1.0
        layers[base] = Layer(kind=KIND_CONV1X1, weight=eye, bias=np.zeros(model.width, np.float32))
        for off in (4, 5):
            L = layers[base + off]
            layers[base + off] = Layer(
                kind=L.kind,
                weight=np.zeros_like(L.weight),
                bias=np.zeros_like(L.bias),
            )
        L = layers[base + 6]
        layers[base + 6] = Layer(
            kind=KIND_LAYERNORM,
            ln_scale=np.zeros_like(L.ln_scale),
            ln_shift=np.zeros_like(L.ln_shift),
        )
    gated = DenoiserModel(width=model.width, blocks=model.blocks, layers=tuple(layers))
    validate_model(gated)

    # equivalent two-layer linear map: stem then tail
    stem, tail3, proj = model.layers[0], model.layers[-2], model.layers[-1]
    linear = DenoiserModel(width=model.width, blocks=0, layers=(stem, tail3, proj))
    Z = np.random.default_rng(2).standard_normal((6, 6)) + 0j
    assert np.allclose(denoise_window(gated, Z), denoise_window(linear, Z), atol=1e-6)


def test_forward_matches_straight_loop_oracle():
    rng = np.random.default_rng(3)
    model = random_model(5, 2, rng, scale=0.5)
    Z = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    fast = denoise_window(model, Z)
    slow = forward_loop(model, Z)
    assert np.max(np.abs(fast - slow)) < 1e-5


def test_forward_is_deterministic_bitwise():
    rng = np.random.default_rng(4)
    model = random_model(6, 3, rng)
    Z = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    a = denoise_window(model, Z)
    b = denoise_window(model, Z)
    assert np.array_equal(a, b)


def test_layernorm_definition():
    from otfskit.denoiser import _layernorm

    rng = np.random.default_rng(5)
    x = rng.standard_normal((16, 8, 8)).astype(np.float32) * 3.0 + 1.5
    layer = Layer(
        kind=KIND_LAYERNORM,
        ln_scale=np.ones(16, dtype=np.float32),
        ln_shift=np.zeros(16, dtype=np.float32),
    )
    out = _layernorm(layer, x)
    mu = out.mean(axis=0)
    var = out.var(axis=0)
    assert np.max(np.abs(mu)) <= 1e-6
    assert np.max(np.abs(var - 1.0)) <= 1e-4


def test_parameter_counts():
    # release criterion: W=13, B=4 within 3% of the 1.586e4 target budget
    assert reference_param_count(13, 4) == 16265
    assert abs(16265 - 1.586e4) / 1.586e4 < 0.03
    rng = np.random.default_rng(6)
    assert random_model(13, 4, rng).param_count == 16265
    # closed form 93 W^2 + 42 W + 2 holds for the 4-block topology
    for W in (1, 2, 7, 13):
        assert reference_param_count(W, 4) == 93 * W * W + 42 * W + 2
    # general-topology count at W=1, B=1 (one block: 21W^2+9W per block)
    assert reference_param_count(1, 1) == 47
    assert random_model(1, 1, rng).param_count == 47


def test_layer_count_and_plan():
    assert layer_count(4) == 31
    plan = layer_plan(3, 1)
    kinds = [k for k, _, _ in plan]
    assert kinds == [
        KIND_CONV1X1,
        KIND_CONV1X1,
        KIND_CONV1X1,
        KIND_CONV3X3,
        KIND_LAYERNORM,
        KIND_CONV1X1,
        KIND_CONV3X3,
        KIND_LAYERNORM,
        KIND_CONV3X3,
        KIND_PROJECTION,
    ]
    assert plan[0][1:] == (2, 3)
    assert plan[-1][1:] == (3, 2)


def test_validate_model_rejects_bad_shapes():
    rng = np.random.default_rng(7)
    model = random_model(4, 1, rng)
    layers = list(model.layers)
    bad = Layer(
        kind=KIND_CONV1X1,
        weight=np.zeros((4, 3, 1, 1), np.float32),
        bias=np.zeros(4, np.float32),
    )
    layers[0] = bad
    with pytest.raises(ModelShapeError):
        validate_model(DenoiserModel(width=4, blocks=1, layers=tuple(layers)))


def test_denoise_window_rejects_bad_input():
    model = zero_model(4, 1)
    with pytest.raises(ModelShapeError):
        denoise_window(model, np.zeros(8, complex))
