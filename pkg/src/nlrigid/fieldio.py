"""Field file format and delimited exports.

Layout of a field file:

* line 1: ``NLRG1 <dim>``
* one line per axis: ``<n> <h> <origin> <periodic|clamp>``
* raw payload: row-major float64, little-endian, no separator.

The ASCII floats are written with ``repr`` so the header round-trips
bit-exactly; the payload is the raw IEEE bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigurationError, FieldIOError
from .grid import BOUNDARIES, Field, Grid

MAGIC = "NLRG1"


def write_field(field, path):
    grid = field.grid
    lines = [f"{MAGIC} {grid.dim}\n"]
    for i in range(grid.dim):
        lines.append(
            f"{grid.n[i]} {grid.h[i]!r} {grid.origin[i]!r} {grid.boundary[i]}\n"
        )
    header = "".join(lines).encode("ascii")
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    Path(path).write_bytes(header + payload)


def _take_line(raw, offset):
    end = raw.find(b"\n", offset)
    if end < 0:
        raise FieldIOError("unterminated header line", offset=offset)
    try:
        text = raw[offset:end].decode("ascii")
    except UnicodeDecodeError as exc:
        raise FieldIOError(f"header is not ASCII: {exc}", offset=offset) from None
    return text, end + 1


def read_field(path):
    raw = Path(path).read_bytes()
    line, offset = _take_line(raw, 0)
    parts = line.split()
    if len(parts) != 2 or parts[0] != MAGIC:
        raise FieldIOError(f"bad magic line {line!r}, expected '{MAGIC} <dim>'", offset=0)
    try:
        dim = int(parts[1])
    except ValueError:
        raise FieldIOError(f"bad dimension {parts[1]!r}", offset=0) from None
    if dim not in (1, 2):
        raise FieldIOError(f"unsupported dimension {dim}", offset=0)

    n, h, origin, boundary = [], [], [], []
    for axis in range(dim):
        line_offset = offset
        line, offset = _take_line(raw, offset)
        parts = line.split()
        if len(parts) != 4:
            raise FieldIOError(
                f"axis {axis}: expected '<n> <h> <origin> <boundary>', got {line!r}",
                offset=line_offset,
            )
        try:
            n.append(int(parts[0]))
            h.append(float(parts[1]))
            origin.append(float(parts[2]))
        except ValueError:
            raise FieldIOError(f"axis {axis}: unparsable numbers in {line!r}", offset=line_offset) from None
        if parts[3] not in BOUNDARIES:
            raise FieldIOError(f"axis {axis}: unknown boundary {parts[3]!r}", offset=line_offset)
        boundary.append(parts[3])

    try:
        grid = Grid(tuple(n), tuple(h), tuple(origin), tuple(boundary))
    except ConfigurationError as exc:
        raise FieldIOError(f"invalid grid header: {exc}", offset=0) from None

    expected = grid.size * 8
    payload = raw[offset:]
    if len(payload) < expected:
        raise FieldIOError(
            f"truncated payload: expected {expected} bytes, found {len(payload)}",
            offset=offset + len(payload),
        )
    if len(payload) > expected:
        raise FieldIOError("trailing bytes after payload", offset=offset + expected)
    values = np.frombuffer(payload, dtype="<f8")
    finite = np.isfinite(values)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        raise FieldIOError(
            f"non-finite value at flat index {bad}", offset=offset + 8 * bad
        )
    return Field(grid, values)


def field_to_csv(field, path):
    """``x[,y],value`` rows; floats written with repr for exact round-trips."""
    grid = field.grid
    with open(path, "w", encoding="ascii") as fh:
        if grid.dim == 1:
            fh.write("x,value\n")
            x = grid.axis_coords(0)
            for xi, vi in zip(x, field.values):
                fh.write(f"{float(xi)!r},{float(vi)!r}\n")
        else:
            fh.write("x,y,value\n")
            x, y = grid.coords()
            for xi, yi, vi in zip(x.ravel(), y.ravel(), field.values.ravel()):
                fh.write(f"{float(xi)!r},{float(yi)!r},{float(vi)!r}\n")
