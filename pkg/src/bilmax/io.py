"""On-disk interchange formats.

Raw fields: 64-byte header (magic ``BLXF0001``, uint32 dim, uint32 N,
float64 L, uint8 complex flag, zero padding), then the samples as
little-endian float64, row-major; complex fields store the full real
part followed by the full imaginary part.  The format is self-describing
so oracle cross-checks in other languages can read it bit-exactly.

Reports: JSON with sorted keys and no timestamps (run metadata,
including wall-clock times, goes to a sibling file so repeated runs with
the same seed produce byte-identical reports).
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .grids import Field, Grid

_MAGIC = b"BLXF0001"
_HEADER = struct.Struct("<8sII d B 39x")
assert _HEADER.size == 64


def write_field(path, f: Field):
    vals = f.values
    is_complex = bool(np.any(np.abs(vals.imag) > 0))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, f.grid.dim, f.grid.points_per_axis,
                              f.grid.extent, 1 if is_complex else 0))
        fh.write(np.ascontiguousarray(vals.real, dtype="<f8").tobytes())
        if is_complex:
            fh.write(np.ascontiguousarray(vals.imag, dtype="<f8").tobytes())


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, dim, n, extent, is_complex = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise InvalidParameterError(f"{path}: bad magic {magic!r}")
        grid = Grid(dim, n, extent)
        count = n**dim
        real = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(grid.shape)
        if is_complex:
            imag = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(grid.shape)
            return Field(grid, real + 1j * imag)
        return Field(grid, real.astype(np.complex128))


def write_tree(path, tree):
    Path(path).write_text("\n".join(tree.to_lines()) + "\n")


def read_tree(path, j=None):
    from .coeffs import CoeffTree

    return CoeffTree.from_lines(Path(path).read_text().splitlines(), j=j)


def _jsonable(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def write_report(path, report: dict):
    Path(path).write_text(json.dumps(report, sort_keys=True, indent=2,
                                     allow_nan=True, default=_jsonable) + "\n")


def write_csv(path, rows: list[dict], columns: list[str] | None = None):
    if not rows:
        Path(path).write_text("")
        return
    columns = columns or sorted({k for row in rows for k in row})
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
