"""DDNW weight file writer/reader (independent of the inference library).

Byte layout is the shared contract documented in FORMATS.md at the repo
root: "DDNW", u32 version=1, u32 layer count, then per layer a u8 kind,
u32 rank + dims, float32 weight data (conv kinds only), u32-prefixed
bias, and for layernorm u32-prefixed scale and shift vectors.  Little
endian throughout.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np
import torch

from .model import GatedDenoiser

MAGIC = b"DDNW"
VERSION = 1
KIND_CONV1X1, KIND_CONV3X3, KIND_LAYERNORM, KIND_PROJECTION = 1, 2, 3, 4
CONV_KINDS = (KIND_CONV1X1, KIND_CONV3X3, KIND_PROJECTION)


def _put_f32(buf: io.BytesIO, arr: np.ndarray) -> None:
    buf.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def export_weights(model: GatedDenoiser, path) -> None:
    layers = model.export_layers()
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<II", VERSION, len(layers)))
    for kind, mod in layers:
        buf.write(struct.pack("<B", kind))
        if kind in CONV_KINDS:
            w = mod.weight.detach().cpu().numpy()
            buf.write(struct.pack("<I", w.ndim))
            buf.write(struct.pack(f"<{w.ndim}I", *w.shape))
            _put_f32(buf, w)
            b = mod.bias.detach().cpu().numpy()
            buf.write(struct.pack("<I", b.size))
            _put_f32(buf, b)
        else:  # layernorm: dims declare the channel count, no weight block
            scale = mod.weight.detach().cpu().numpy()
            shift = mod.bias.detach().cpu().numpy()
            buf.write(struct.pack("<II", 1, scale.size))
            buf.write(struct.pack("<I", 0))  # no bias field
            buf.write(struct.pack("<I", scale.size))
            _put_f32(buf, scale)
            buf.write(struct.pack("<I", shift.size))
            _put_f32(buf, shift)
    Path(path).write_bytes(buf.getvalue())


def import_weights(path) -> GatedDenoiser:
    """Rebuild a model from a DDNW file (used for round-trip checks)."""
    blob = Path(path).read_bytes()
    off = 0

    def take(n):
        nonlocal off
        if off + n > len(blob):
            raise ValueError(f"truncated DDNW file at offset {off}")
        out = blob[off : off + n]
        off += n
        return out

    if take(4) != MAGIC:
        raise ValueError("bad magic")
    version, count = struct.unpack("<II", take(8))
    if version != VERSION:
        raise ValueError(f"unsupported version {version}")
    parsed = []
    for _ in range(count):
        kind = struct.unpack("<B", take(1))[0]
        rank = struct.unpack("<I", take(4))[0]
        dims = struct.unpack(f"<{rank}I", take(4 * rank))
        if kind in CONV_KINDS:
            n = int(np.prod(dims))
            w = np.frombuffer(take(4 * n), dtype="<f4").reshape(dims).copy()
            nb = struct.unpack("<I", take(4))[0]
            b = np.frombuffer(take(4 * nb), dtype="<f4").copy()
            parsed.append((kind, w, b))
        elif kind == KIND_LAYERNORM:
            nb = struct.unpack("<I", take(4))[0]
            take(4 * nb)
            ns = struct.unpack("<I", take(4))[0]
            scale = np.frombuffer(take(4 * ns), dtype="<f4").copy()
            nh = struct.unpack("<I", take(4))[0]
            shift = np.frombuffer(take(4 * nh), dtype="<f4").copy()
            parsed.append((kind, scale, shift))
        else:
            raise ValueError(f"unknown layer kind {kind}")
    if off != len(blob):
        raise ValueError("trailing bytes in DDNW file")

    width = parsed[0][1].shape[0]
    blocks = (count - 3) // 7
    model = GatedDenoiser(width=width, blocks=blocks)
    with torch.no_grad():
        for (kind, a, b), (want_kind, mod) in zip(parsed, model.export_layers()):
            if kind != want_kind:
                raise ValueError(f"layer kind {kind} does not match topology {want_kind}")
            mod.weight.copy_(torch.from_numpy(a.reshape(mod.weight.shape)))
            mod.bias.copy_(torch.from_numpy(b))
    return model
