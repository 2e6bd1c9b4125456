"""Binary dataset (DDDS) and parity-vector (DDPV) file formats.

DDDS carries training records for the denoiser.  Layout, little-endian:

    magic "DDDS", u32 version=1, u32 M_tau, u32 N_nu, u32 F,
    u32 record_count, f64 psnr_db
    per record: F noisy windows then 1 clean target, each stored as a
    float32 Re plane followed by a float32 Im plane (M_tau x N_nu each).

DDPV carries (input, output) forward-pass pairs for cross-component
parity checks:

    magic "DDPV", u32 version=1, u32 count, u32 M_tau, u32 N_nu
    per record: input window then output window, same plane encoding.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DDDS_MAGIC = b"DDDS"
DDPV_MAGIC = b"DDPV"
DDDS_VERSION = 1
DDPV_VERSION = 1
DDDS_HEADER = struct.Struct("<4sIIIIId")
DDPV_HEADER = struct.Struct("<4sIIII")


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetFile:
    """In-memory image of one DDDS file."""

    M_tau: int
    N_nu: int
    F: int
    psnr_db: float
    noisy: np.ndarray  # (records, F, M_tau, N_nu) complex64
    clean: np.ndarray  # (records, M_tau, N_nu) complex64

    @property
    def record_count(self) -> int:
        return self.noisy.shape[0]


def _planes(window: np.ndarray) -> bytes:
    re = np.ascontiguousarray(window.real, dtype="<f4")
    im = np.ascontiguousarray(window.imag, dtype="<f4")
    return re.tobytes() + im.tobytes()


def _unplanes(buf: bytes, M_tau: int, N_nu: int) -> np.ndarray:
    n = M_tau * N_nu
    planes = np.frombuffer(buf, dtype="<f4", count=2 * n)
    re = planes[:n].reshape(M_tau, N_nu)
    im = planes[n:].reshape(M_tau, N_nu)
    return (re + 1j * im).astype(np.complex64)


def record_nbytes(M_tau: int, N_nu: int, F: int) -> int:
    return (F + 1) * 2 * M_tau * N_nu * 4


def write_dataset(path, noisy: np.ndarray, clean: np.ndarray, psnr_db: float) -> None:
    """Serialize snapshot records; `noisy` is (R, F, Mt, Nn), `clean` (R, Mt, Nn)."""
    records, F, M_tau, N_nu = noisy.shape
    if clean.shape != (records, M_tau, N_nu):
        raise ValueError("clean targets do not match noisy records")
    if not (np.isfinite(noisy).all() and np.isfinite(clean).all()):
        raise ValueError("dataset values must be finite")
    chunks = [DDDS_HEADER.pack(DDDS_MAGIC, DDDS_VERSION, M_tau, N_nu, F, records, float(psnr_db))]
    for r in range(records):
        for f in range(F):
            chunks.append(_planes(noisy[r, f]))
        chunks.append(_planes(clean[r]))
    Path(path).write_bytes(b"".join(chunks))


def read_dataset(path) -> DatasetFile:
    blob = Path(path).read_bytes()
    if len(blob) < DDDS_HEADER.size:
        raise DatasetFormatError(f"{path}: shorter than the DDDS header")
    magic, version, M_tau, N_nu, F, records, psnr_db = DDDS_HEADER.unpack_from(blob, 0)
    if magic != DDDS_MAGIC:
        raise DatasetFormatError(f"{path}: bad magic {magic!r}")
    if version != DDDS_VERSION:
        raise DatasetFormatError(f"{path}: version {version}, expected {DDDS_VERSION}")
    rec = record_nbytes(M_tau, N_nu, F)
    expected = DDDS_HEADER.size + records * rec
    if len(blob) != expected:
        raise DatasetFormatError(f"{path}: size {len(blob)} != header-implied {expected}")
    win = 2 * M_tau * N_nu * 4
    noisy = np.empty((records, F, M_tau, N_nu), dtype=np.complex64)
    clean = np.empty((records, M_tau, N_nu), dtype=np.complex64)
    off = DDDS_HEADER.size
    for r in range(records):
        for f in range(F):
            noisy[r, f] = _unplanes(blob[off : off + win], M_tau, N_nu)
            off += win
        clean[r] = _unplanes(blob[off : off + win], M_tau, N_nu)
        off += win
    if not (np.isfinite(noisy).all() and np.isfinite(clean).all()):
        raise DatasetFormatError(f"{path}: non-finite values in records")
    return DatasetFile(M_tau=M_tau, N_nu=N_nu, F=F, psnr_db=psnr_db, noisy=noisy, clean=clean)


def write_parity(path, inputs: np.ndarray, outputs: np.ndarray) -> None:
    """Serialize forward-pass pairs; both arrays are (count, Mt, Nn) complex."""
    if inputs.shape != outputs.shape or inputs.ndim != 3:
        raise ValueError("inputs and outputs must share shape (count, M_tau, N_nu)")
    count, M_tau, N_nu = inputs.shape
    chunks = [DDPV_HEADER.pack(DDPV_MAGIC, DDPV_VERSION, count, M_tau, N_nu)]
    for i in range(count):
        chunks.append(_planes(inputs[i]))
        chunks.append(_planes(outputs[i]))
    Path(path).write_bytes(b"".join(chunks))


def read_parity(path) -> tuple[np.ndarray, np.ndarray]:
    blob = Path(path).read_bytes()
    if len(blob) < DDPV_HEADER.size:
        raise DatasetFormatError(f"{path}: shorter than the DDPV header")
    magic, version, count, M_tau, N_nu = DDPV_HEADER.unpack_from(blob, 0)
    if magic != DDPV_MAGIC:
        raise DatasetFormatError(f"{path}: bad magic {magic!r}")
    if version != DDPV_VERSION:
        raise DatasetFormatError(f"{path}: version {version}, expected {DDPV_VERSION}")
    win = 2 * M_tau * N_nu * 4
    expected = DDPV_HEADER.size + count * 2 * win
    if len(blob) != expected:
        raise DatasetFormatError(f"{path}: size {len(blob)} != header-implied {expected}")
    inputs = np.empty((count, M_tau, N_nu), dtype=np.complex64)
    outputs = np.empty((count, M_tau, N_nu), dtype=np.complex64)
    off = DDPV_HEADER.size
    for i in range(count):
        inputs[i] = _unplanes(blob[off : off + win], M_tau, N_nu)
        off += win
        outputs[i] = _unplanes(blob[off : off + win], M_tau, N_nu)
        off += win
    return inputs, outputs
