"""FVC1: a tiny binary container for bulk float vectors.

Layout: 4 magic bytes ``FVC1``, little-endian u32 row count, u32 dimension,
``rows * dim`` little-endian float32 values (row major), then a trailing
little-endian u64 checksum holding the sum of all data bytes mod 2**64.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"FVC1"
_HEADER = struct.Struct("<4sII")
_CHECKSUM = struct.Struct("<Q")


class Fvc1Error(Exception):
    pass


def _byte_sum(data: bytes) -> int:
    return int(np.frombuffer(data, dtype=np.uint8).sum(dtype=np.uint64))


def write_fvc1(path, rows: np.ndarray) -> None:
    rows = np.asarray(rows, dtype=np.float32)
    if rows.ndim != 2:
        raise Fvc1Error("rows must be a 2-D array")
    payload = np.ascontiguousarray(rows).tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows.shape[0], rows.shape[1]))
        fh.write(payload)
        fh.write(_CHECKSUM.pack(_byte_sum(payload)))


def read_fvc1(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size + _CHECKSUM.size:
        raise Fvc1Error(f"{path}: file too short for FVC1")
    magic, n_rows, dim = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise Fvc1Error(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 4 * n_rows * dim + _CHECKSUM.size
    if len(blob) != expected:
        raise Fvc1Error(f"{path}: expected {expected} bytes, found {len(blob)}")
    payload = blob[_HEADER.size : _HEADER.size + 4 * n_rows * dim]
    (stored,) = _CHECKSUM.unpack_from(blob, len(blob) - _CHECKSUM.size)
    if stored != _byte_sum(payload):
        raise Fvc1Error(f"{path}: checksum mismatch")
    return np.frombuffer(payload, dtype="<f4").reshape(n_rows, dim).astype(np.float32)
