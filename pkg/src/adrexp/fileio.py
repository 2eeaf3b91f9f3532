"""On-disk formats: binary field snapshots, indicator CSV, run metadata.

Snapshot layout (``.adrf``), all little-endian::

    b"ADRF" | uint32 version | uint32 d | uint32 n_1 ... n_d | float64 x N

with the N values in vec order (first index fastest).
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .tensor import unvec, vec

SNAPSHOT_MAGIC = b"ADRF"
SNAPSHOT_VERSION = 1
INDICATORS_VERSION = 1
INDICATORS_HEADER = ("t", "mean_u", "increment_u_fro")
CONVERGENCE_HEADER = ("steps", "seconds", "error", "order")

PathLike = Union[str, Path]


class SnapshotFormatError(ValueError):
    pass


def write_snapshot(path: PathLike, T: np.ndarray) -> None:
    T = np.asarray(T, dtype=float)
    header = SNAPSHOT_MAGIC + struct.pack(f"<II{T.ndim}I", SNAPSHOT_VERSION, T.ndim, *T.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(vec(T).astype("<f8").tobytes())


def read_snapshot(path: PathLike) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: not an ADRF snapshot")
    version, d = struct.unpack_from("<II", raw, 4)
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"{path}: unsupported snapshot version {version}")
    dims = struct.unpack_from(f"<{d}I", raw, 12)
    offset = 12 + 4 * d
    N = int(np.prod(dims))
    if len(raw) != offset + 8 * N:
        raise SnapshotFormatError(f"{path}: expected {N} values, file size does not match")
    data = np.frombuffer(raw, dtype="<f8", count=N, offset=offset).astype(float)
    return unvec(data, dims)


def snapshot_name(component: str, step: int) -> str:
    return f"{component}_{step}.adrf"


def write_indicators(path: PathLike, t: Sequence[float], mean_u: Sequence[float],
                     increment: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(INDICATORS_HEADER)
        for row in zip(t, mean_u, increment):
            w.writerow([repr(float(x)) for x in row])


def read_indicators(path: PathLike) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != INDICATORS_HEADER:
        raise ValueError(f"{path}: unexpected header {rows[0]}")
    return np.array([[float(x) for x in r] for r in rows[1:]]).reshape(-1, 3)


def write_convergence(path_or_file, rows: Iterable) -> None:
    def _write(fh):
        w = csv.writer(fh)
        w.writerow(CONVERGENCE_HEADER)
        for r in rows:
            w.writerow([r.steps, f"{r.seconds:.6g}", f"{r.error:.6e}",
                        "" if r.order is None else f"{r.order:.4f}"])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def write_metadata(path: PathLike, meta: dict) -> None:
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
