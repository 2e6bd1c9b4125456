"""DDDS dataset reader and frame-level train/val/test splitting."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DDDS_MAGIC = b"DDDS"
DDDS_HEADER = struct.Struct("<4sIIIIId")


@dataclass(frozen=True)
class SnapshotRecords:
    """Contents of one DDDS file: F noisy frames per record + clean target."""

    psnr_db: float
    noisy: np.ndarray  # (records, F, Mt, Nn) complex64
    clean: np.ndarray  # (records, Mt, Nn) complex64

    @property
    def record_count(self) -> int:
        return self.noisy.shape[0]


def load_records(path) -> SnapshotRecords:
    blob = Path(path).read_bytes()
    if len(blob) < DDDS_HEADER.size:
        raise ValueError(f"{path}: not a DDDS file (too short)")
    magic, version, M_tau, N_nu, F, records, psnr_db = DDDS_HEADER.unpack_from(blob, 0)
    if magic != DDDS_MAGIC or version != 1:
        raise ValueError(f"{path}: bad magic/version")
    n = M_tau * N_nu
    per_win = 2 * n * 4
    expected = DDDS_HEADER.size + records * (F + 1) * per_win
    if len(blob) != expected:
        raise ValueError(f"{path}: size {len(blob)} != expected {expected}")
    raw = np.frombuffer(blob, dtype="<f4", offset=DDDS_HEADER.size)
    raw = raw.reshape(records, F + 1, 2, M_tau, N_nu)
    windows = (raw[:, :, 0] + 1j * raw[:, :, 1]).astype(np.complex64)
    return SnapshotRecords(psnr_db=psnr_db, noisy=windows[:, :F], clean=windows[:, F])


@dataclass(frozen=True)
class Split:
    """Frame-level sample arrays for one dataset partition."""

    inputs: np.ndarray  # (samples, Mt, Nn) complex64
    targets: np.ndarray  # (samples, Mt, Nn) complex64
    psnr_db: np.ndarray  # (samples,)

    def __len__(self) -> int:
        return self.inputs.shape[0]


def record_split_indices(
    record_count: int,
    ratios: tuple[float, float, float],
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shuffled train/val/test record indices for one file."""
    order = rng.permutation(record_count)
    n_train = int(round(ratios[0] * record_count))
    n_val = int(round(ratios[1] * record_count))
    return order[:n_train], order[n_train : n_train + n_val], order[n_train + n_val :]


def split_records(
    files: list[SnapshotRecords],
    ratios: tuple[float, float, float],
    seed: int,
) -> tuple[Split, Split, Split]:
    """Per-file record shuffle + ratio split, then frames become samples.

    Records (channel realizations) are split, not frames, so no channel
    leaks between partitions; each record then contributes its F frames
    to its partition.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    rng = np.random.default_rng(seed)
    parts: list[list[tuple]] = [[], [], []]
    for rec in files:
        bounds = record_split_indices(rec.record_count, ratios, rng)
        for part, idx in zip(parts, bounds):
            if idx.size:
                part.append((rec.noisy[idx], rec.clean[idx], rec.psnr_db))
    out = []
    for part in parts:
        if not part:
            out.append(Split(
                inputs=np.zeros((0, 1, 1), np.complex64),
                targets=np.zeros((0, 1, 1), np.complex64),
                psnr_db=np.zeros(0),
            ))
            continue
        ins, tgts, psnrs = [], [], []
        for noisy, clean, psnr in part:
            R, F = noisy.shape[:2]
            ins.append(noisy.reshape(R * F, *noisy.shape[2:]))
            tgts.append(np.repeat(clean, F, axis=0))
            psnrs.append(np.full(R * F, psnr))
        out.append(Split(
            inputs=np.concatenate(ins),
            targets=np.concatenate(tgts),
            psnr_db=np.concatenate(psnrs),
        ))
    return tuple(out)
