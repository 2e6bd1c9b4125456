"""Gated residual denoiser: activation-free inference on pilot windows.

The network maps the 2-channel real view [Re Z, Im Z] of an observation
window through a 1x1 stem, B identical residual blocks, and a two-stage
tail.  Each block computes A(X) + U(X) * V(X): A is a 1x1 projection skip
and U, V are twin conv1x1 -> conv3x3 -> layernorm pipelines whose product
is the only nonlinearity.  3x3 convolutions use zero padding (the window
is a non-periodic crop) and no layer changes the spatial size.  All
arithmetic is float32.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KIND_CONV1X1 = 1
KIND_CONV3X3 = 2
KIND_LAYERNORM = 3
KIND_PROJECTION = 4

KIND_NAMES = {
    KIND_CONV1X1: "conv1x1",
    KIND_CONV3X3: "conv3x3",
    KIND_LAYERNORM: "layernorm",
    KIND_PROJECTION: "projection",
}

LN_EPS = np.float32(1e-6)

# layers inside one residual block: skip conv + two gate pipelines
BLOCK_LAYERS = 7


class ModelShapeError(ValueError):
    """Layer shapes do not chain into the reference topology."""


@dataclass(frozen=True)
class Layer:
    kind: int
    weight: np.ndarray | None = None  # conv kernels, [out][in][kh][kw] float32
    bias: np.ndarray | None = None
    ln_scale: np.ndarray | None = None
    ln_shift: np.ndarray | None = None

    @property
    def param_count(self) -> int:
        return sum(
            int(a.size)
            for a in (self.weight, self.bias, self.ln_scale, self.ln_shift)
            if a is not None
        )


@dataclass(frozen=True)
class DenoiserModel:
    """Ordered flat layer list of the reference topology."""

    width: int
    blocks: int
    layers: tuple[Layer, ...]

    @property
    def param_count(self) -> int:
        return sum(layer.param_count for layer in self.layers)


def layer_plan(width: int, blocks: int) -> list[tuple[int, int, int]]:
    """(kind, in_ch, out_ch) for every layer of the reference topology."""
    W = width
    plan = [(KIND_CONV1X1, 2, W)]
    for _ in range(blocks):
        plan.append((KIND_CONV1X1, W, W))  # skip projection A
        for _ in range(2):  # U then V pipeline
            plan.append((KIND_CONV1X1, W, W))
            plan.append((KIND_CONV3X3, W, W))
            plan.append((KIND_LAYERNORM, W, W))
        # gating multiplies U and V elementwise; no parameters
    plan.append((KIND_CONV3X3, W, W))
    plan.append((KIND_PROJECTION, W, 2))
    return plan


def reference_param_count(width: int, blocks: int) -> int:
    """Closed-form parameter count of the reference topology."""
    W = width
    per_block = 21 * W * W + 9 * W
    return 3 * W + blocks * per_block + 9 * W * W + W + 2 * W + 2


def layer_count(blocks: int) -> int:
    return 1 + BLOCK_LAYERS * blocks + 2


def validate_model(model: DenoiserModel) -> None:
    """Shape-chain and finiteness check against the reference plan."""
    plan = layer_plan(model.width, model.blocks)
    if len(model.layers) != len(plan):
        raise ModelShapeError(
            f"expected {len(plan)} layers for W={model.width} B={model.blocks}, "
            f"got {len(model.layers)}"
        )
    for i, (layer, (kind, cin, cout)) in enumerate(zip(model.layers, plan)):
        if layer.kind != kind:
            raise ModelShapeError(
                f"layer {i}: kind {KIND_NAMES.get(layer.kind)} != {KIND_NAMES[kind]}"
            )
        if kind == KIND_LAYERNORM:
            if layer.ln_scale is None or layer.ln_shift is None:
                raise ModelShapeError(f"layer {i}: layernorm missing affine vectors")
            if layer.ln_scale.shape != (cout,) or layer.ln_shift.shape != (cout,):
                raise ModelShapeError(f"layer {i}: layernorm affine shape != ({cout},)")
        else:
            ksz = 3 if kind == KIND_CONV3X3 else 1
            want = (cout, cin, ksz, ksz)
            if layer.weight is None or layer.weight.shape != want:
                got = None if layer.weight is None else layer.weight.shape
                raise ModelShapeError(f"layer {i}: conv weight shape {got} != {want}")
            if layer.bias is None or layer.bias.shape != (cout,):
                raise ModelShapeError(f"layer {i}: conv bias shape != ({cout},)")
    for i, layer in enumerate(model.layers):
        for a in (layer.weight, layer.bias, layer.ln_scale, layer.ln_shift):
            if a is not None and not np.isfinite(a).all():
                raise NonFiniteWeightError(f"layer {i} contains non-finite values")


class NonFiniteWeightError(ValueError):
    """A weight tensor contains NaN or infinity."""


def _conv1x1(layer: Layer, x: np.ndarray) -> np.ndarray:
    out = np.tensordot(layer.weight[:, :, 0, 0], x, axes=([1], [0]))
    return out + layer.bias[:, None, None]


def _conv3x3(layer: Layer, x: np.ndarray) -> np.ndarray:
    C, H, W = x.shape
    xp = np.zeros((C, H + 2, W + 2), dtype=np.float32)
    xp[:, 1 : H + 1, 1 : W + 1] = x
    out = np.zeros((layer.weight.shape[0], H, W), dtype=np.float32)
    for dy in range(3):
        for dx in range(3):
            out += np.tensordot(
                layer.weight[:, :, dy, dx], xp[:, dy : dy + H, dx : dx + W], axes=([1], [0])
            )
    return out + layer.bias[:, None, None]


def _layernorm(layer: Layer, x: np.ndarray) -> np.ndarray:
    # per spatial position: normalize across channels, then learned affine
    mu = x.mean(axis=0, dtype=np.float32)
    var = np.mean((x - mu) ** 2, axis=0, dtype=np.float32)
    xn = (x - mu) / np.sqrt(var + LN_EPS)
    return xn * layer.ln_scale[:, None, None] + layer.ln_shift[:, None, None]


def _pipeline(layers: tuple[Layer, ...], x: np.ndarray) -> np.ndarray:
    x = _conv1x1(layers[0], x)
    x = _conv3x3(layers[1], x)
    return _layernorm(layers[2], x)


def denoise_window(model: DenoiserModel, Z: np.ndarray) -> np.ndarray:
    """Forward pass on one complex window; returns the denoised window."""
    if Z.ndim != 2:
        raise ModelShapeError(f"expected a 2-D window, got shape {Z.shape}")
    x = np.stack(
        [np.ascontiguousarray(Z.real, dtype=np.float32), np.ascontiguousarray(Z.imag, dtype=np.float32)]
    )
    layers = model.layers
    x = _conv1x1(layers[0], x)
    idx = 1
    for _ in range(model.blocks):
        a = _conv1x1(layers[idx], x)
        u = _pipeline(layers[idx + 1 : idx + 4], x)
        v = _pipeline(layers[idx + 4 : idx + 7], x)
        x = a + u * v
        idx += BLOCK_LAYERS
    x = _conv3x3(layers[idx], x)
    x = _conv1x1(layers[idx + 1], x)
    return x[0].astype(np.float64) + 1j * x[1].astype(np.float64)


def random_model(width: int, blocks: int, rng: np.random.Generator, scale: float = 0.25) -> DenoiserModel:
    """Randomly initialized model (fan-in scaled); used by tests and parity."""
    layers = []
    for kind, cin, cout in layer_plan(width, blocks):
        if kind == KIND_LAYERNORM:
            layers.append(
                Layer(
                    kind=kind,
                    ln_scale=np.ones(cout, dtype=np.float32),
                    ln_shift=np.zeros(cout, dtype=np.float32),
                )
            )
        else:
            ksz = 3 if kind == KIND_CONV3X3 else 1
            fan_in = cin * ksz * ksz
            w = rng.standard_normal((cout, cin, ksz, ksz)) * scale / np.sqrt(fan_in)
            b = rng.standard_normal(cout) * 0.01
            layers.append(
                Layer(kind=kind, weight=w.astype(np.float32), bias=b.astype(np.float32))
            )
    model = DenoiserModel(width=width, blocks=blocks, layers=tuple(layers))
    validate_model(model)
    return model


def zero_model(width: int, blocks: int) -> DenoiserModel:
    """All-zero weights and biases; annihilates any input."""
    layers = []
    for kind, cin, cout in layer_plan(width, blocks):
        if kind == KIND_LAYERNORM:
            layers.append(
                Layer(
                    kind=kind,
                    ln_scale=np.zeros(cout, dtype=np.float32),
                    ln_shift=np.zeros(cout, dtype=np.float32),
                )
            )
        else:
            ksz = 3 if kind == KIND_CONV3X3 else 1
            layers.append(
                Layer(
                    kind=kind,
                    weight=np.zeros((cout, cin, ksz, ksz), dtype=np.float32),
                    bias=np.zeros(cout, dtype=np.float32),
                )
            )
    return DenoiserModel(width=width, blocks=blocks, layers=tuple(layers))
