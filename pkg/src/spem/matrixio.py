"""Input matrix formats: raw binary ("SPEM") and CSV with optional labels.

Binary layout: 16-byte header {magic "SPEM", u32 N, u32 M, u32 dtype} with
dtype 0 = little-endian float64, followed by N*M row-major values.  The
binary format is for inputs only; artifacts are JSON.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .data import DataMatrix
from .errors import FormatError

MAGIC = b"SPEM"
_HEADER = struct.Struct("<4sIII")
DTYPE_F64_LE = 0


def save_matrix(path, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(np.asarray(arr, dtype=np.float64))
    if arr.ndim != 2:
        raise FormatError(f"matrix must be 2-D, got ndim={arr.ndim}")
    n, m = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, m, DTYPE_F64_LE))
        fh.write(arr.astype("<f8", copy=False).tobytes(order="C"))


def load_matrix(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: shorter than the 16-byte header")
    magic, n, m, dtype = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if dtype != DTYPE_F64_LE:
        raise FormatError(f"{path}: unknown dtype code {dtype}")
    expected = _HEADER.size + n * m * 8
    if len(raw) != expected:
        raise FormatError(
            f"{path}: payload is {len(raw)} bytes, header implies {expected}"
        )
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    return flat.reshape(n, m).astype(np.float64)


def save_csv(path, points: np.ndarray, labels: np.ndarray | None = None) -> None:
    pts = np.asarray(points, dtype=np.float64)
    if labels is not None:
        out = np.column_stack([pts, np.asarray(labels, dtype=np.float64)])
    else:
        out = pts
    np.savetxt(path, out, delimiter=",", fmt="%.17g")


def load_csv(path, label_column: bool = False) -> DataMatrix:
    try:
        raw = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if label_column:
        if raw.shape[1] < 2:
            raise FormatError(f"{path}: no feature columns besides the label")
        labels = raw[:, -1]
        if not np.all(labels == np.round(labels)):
            raise FormatError(f"{path}: label column holds non-integer values")
        return DataMatrix(raw[:, :-1], labels=labels.astype(np.int64))
    return DataMatrix(raw)


def load_points(path, label_column: bool = False) -> DataMatrix:
    """Sniff the format by magic bytes: binary matrix or CSV."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        if label_column:
            raise FormatError("the binary matrix format carries no labels")
        return DataMatrix(load_matrix(path))
    return load_csv(path, label_column=label_column)
