"""File formats: paired-trajectory CSV and the dense snapshot binary format."""

import struct
from pathlib import Path

import numpy as np

from .cca import TrajectoryPairs
from .errors import InputError

_MAGIC = b"CMDX"
_HEADER = struct.Struct("<4sIII")  # magic, d, n, reserved (16 bytes)


def write_pairs_csv(path, pairs):
    """Header x1,..,xd,y1,..,yd; one sample pair per row."""
    dx = pairs.X.shape[1]
    dy = pairs.Y.shape[1]
    header = ",".join([f"x{i+1}" for i in range(dx)] + [f"y{i+1}" for i in range(dy)])
    np.savetxt(
        path,
        np.hstack([pairs.X, pairs.Y]),
        delimiter=",",
        header=header,
        comments="",
    )


def read_pairs_csv(path, lag=None):
    path = Path(path)
    try:
        with open(path) as fh:
            header = fh.readline().strip()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}", "io") from exc
    cols = [c.strip().lower() for c in header.split(",")]
    dx = sum(1 for c in cols if c.startswith("x"))
    dy = sum(1 for c in cols if c.startswith("y"))
    if dx == 0 or dy == 0 or dx + dy != len(cols):
        raise InputError(
            f"{path}:1: header must be x1..xd,y1..yd, got {header!r}", "io"
        )
    rows = []
    with open(path) as fh:
        next(fh)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != dx + dy:
                raise InputError(
                    f"{path}:{lineno}: expected {dx + dy} fields, got {len(parts)}", "io"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}", "io") from exc
    if not rows:
        raise InputError(f"{path}: no data rows", "io")
    data = np.array(rows)
    return TrajectoryPairs(X=data[:, :dx], Y=data[:, dx:], lag=lag)


def write_snapshots(path, M):
    """Dense binary matrix: 16-byte header (magic 'CMDX', u32 d, u32 n),
    then row-major d x n float64 payload."""
    M = np.ascontiguousarray(np.atleast_2d(np.asarray(M, dtype="<f8")))
    d, n = M.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, d, n, 0))
        fh.write(M.tobytes())


def read_snapshots(path):
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise InputError(f"{path}: truncated header", "io")
    magic, d, n, _ = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise InputError(f"{path}: bad magic {magic!r}, expected {_MAGIC!r}", "io")
    expected = _HEADER.size + 8 * d * n
    if len(raw) != expected:
        raise InputError(
            f"{path}: payload size mismatch (d={d}, n={n}: expected {expected} bytes, "
            f"got {len(raw)})",
            "io",
        )
    return np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(d, n).copy()


def read_matrix_csv(path):
    """Plain numeric CSV (no header) as a 2-D array."""
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot parse {path}: {exc}", "io") from exc
    return M
