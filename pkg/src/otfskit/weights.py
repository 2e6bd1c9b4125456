"""DDNW weight-file serialization (shared contract with the trainer).

Layout, all little-endian:

    magic  "DDNW" (4 bytes)
    u32    version (= 1)
    u32    layer count
    per layer:
        u8   kind code (1 conv1x1, 2 conv3x3, 3 layernorm, 4 projection)
        u32  rank, then u32 dims[rank]
        f32  weights, row-major, prod(dims) values (conv kinds; 0 for layernorm)
        u32  bias length, then f32 bias
        layernorm only: u32 len + f32 scale, u32 len + f32 shift
"""

from __future__ import annotations

import struct
from pathlib import Path as FsPath

import numpy as np

from .denoiser import (
    KIND_CONV1X1,
    KIND_CONV3X3,
    KIND_LAYERNORM,
    KIND_PROJECTION,
    DenoiserModel,
    Layer,
    ModelShapeError,
    NonFiniteWeightError,
    validate_model,
)

MAGIC = b"DDNW"
VERSION = 1
_CONV_KINDS = (KIND_CONV1X1, KIND_CONV3X3, KIND_PROJECTION)


class WeightFormatError(ValueError):
    """Base class for weight-file parse failures."""


class BadMagicError(WeightFormatError):
    pass


class VersionMismatchError(WeightFormatError):
    pass


class TruncatedFileError(WeightFormatError):
    pass


def save_model(model: DenoiserModel, path) -> None:
    validate_model(model)
    chunks = [MAGIC, struct.pack("<II", VERSION, len(model.layers))]
    for layer in model.layers:
        chunks.append(struct.pack("<B", layer.kind))
        if layer.kind in _CONV_KINDS:
            dims = layer.weight.shape
            chunks.append(struct.pack("<I", len(dims)))
            chunks.append(struct.pack(f"<{len(dims)}I", *dims))
            chunks.append(np.ascontiguousarray(layer.weight, dtype="<f4").tobytes())
            chunks.append(struct.pack("<I", layer.bias.size))
            chunks.append(np.ascontiguousarray(layer.bias, dtype="<f4").tobytes())
        else:
            C = layer.ln_scale.size
            chunks.append(struct.pack("<II", 1, C))  # rank 1, dims [C]; no weight data
            chunks.append(struct.pack("<I", 0))  # no bias
            chunks.append(struct.pack("<I", C))
            chunks.append(np.ascontiguousarray(layer.ln_scale, dtype="<f4").tobytes())
            chunks.append(struct.pack("<I", C))
            chunks.append(np.ascontiguousarray(layer.ln_shift, dtype="<f4").tobytes())
    FsPath(path).write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.off = 0

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.blob):
            raise TruncatedFileError(
                f"need {n} bytes at offset {self.off}, file has {len(self.blob)}"
            )
        out = self.blob[self.off : self.off + n]
        self.off += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u8(self) -> int:
        return struct.unpack("<B", self.take(1))[0]

    def f32(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(4 * count), dtype="<f4").copy()


def load_model(path) -> DenoiserModel:
    """Parse and validate a DDNW file into a DenoiserModel."""
    blob = FsPath(path).read_bytes()
    r = _Reader(blob)
    if r.take(4) != MAGIC:
        raise BadMagicError(f"{path}: not a DDNW file")
    version = r.u32()
    if version != VERSION:
        raise VersionMismatchError(f"{path}: version {version}, expected {VERSION}")
    n_layers = r.u32()
    layers = []
    for i in range(n_layers):
        kind = r.u8()
        rank = r.u32()
        if rank > 8:
            raise WeightFormatError(f"layer {i}: implausible rank {rank}")
        dims = tuple(r.u32() for _ in range(rank))
        if kind in _CONV_KINDS:
            weight = r.f32(int(np.prod(dims))).reshape(dims)
            bias = r.f32(r.u32())
            layers.append(Layer(kind=kind, weight=weight, bias=bias))
        elif kind == KIND_LAYERNORM:
            nbias = r.u32()
            if nbias:
                r.f32(nbias)  # layernorm carries no bias; skip if present
            scale = r.f32(r.u32())
            shift = r.f32(r.u32())
            layers.append(Layer(kind=kind, ln_scale=scale, ln_shift=shift))
        else:
            raise WeightFormatError(f"layer {i}: unknown kind code {kind}")
    if r.off != len(blob):
        raise WeightFormatError(f"{len(blob) - r.off} trailing bytes after last layer")

    width, blocks = _infer_topology(layers)
    model = DenoiserModel(width=width, blocks=blocks, layers=tuple(layers))
    validate_model(model)
    return model


def _infer_topology(layers: list[Layer]) -> tuple[int, int]:
    if not layers or layers[0].kind != KIND_CONV1X1 or layers[0].weight is None:
        raise ModelShapeError("first layer must be the 1x1 stem convolution")
    width = layers[0].weight.shape[0]
    blocks, rem = divmod(len(layers) - 3, 7)
    if rem != 0 or blocks < 0:
        raise ModelShapeError(f"layer count {len(layers)} does not fit 7B+3")
    return width, blocks


__all__ = [
    "MAGIC",
    "VERSION",
    "save_model",
    "load_model",
    "WeightFormatError",
    "BadMagicError",
    "VersionMismatchError",
    "TruncatedFileError",
    "ModelShapeError",
    "NonFiniteWeightError",
]
