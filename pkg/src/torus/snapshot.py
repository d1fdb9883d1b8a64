"""Binary snapshots and CSV export of torus fields.

Snapshot layout (little-endian): magic ``b"SLLG"``, then version, n and
component count as u32, then every component as f64 in row-major order.
"""

import csv
from pathlib import Path

import numpy as np

from src.core.exceptions import FieldError
from src.torus.fields import Field
from src.torus.grid import Grid

MAGIC = b"SLLG"
VERSION = 1
_HEADER = np.dtype([("version", "<u4"), ("n", "<u4"), ("count", "<u4")])


def encode_snapshot(field: Field) -> bytes:
    """Serialise a field to the snapshot byte format."""
    count = int(np.prod(field.shape)) if field.shape else 1
    header = np.array([(VERSION, field.grid.n, count)], dtype=_HEADER)
    body = np.ascontiguousarray(field.values, dtype="<f8")
    return MAGIC + header.tobytes() + body.tobytes()


def decode_snapshot(data: bytes, components: tuple[int, ...] | None = None) -> Field:
    """Parse snapshot bytes.

    Args:
        data: Raw snapshot bytes
        components: Component shape to restore; defaults to a flat tuple of
            the stored count (a scalar field when the count is 1)

    Raises:
        FieldError: If the header is malformed or the body has the wrong size
    """
    if data[:4] != MAGIC:
        raise FieldError("Not an SLLG snapshot (bad magic)")
    header = np.frombuffer(data, dtype=_HEADER, count=1, offset=4)[0]
    if int(header["version"]) != VERSION:
        raise FieldError(f"Unsupported snapshot version {int(header['version'])}")
    n, count = int(header["n"]), int(header["count"])
    body = np.frombuffer(data, dtype="<f8", offset=4 + _HEADER.itemsize)
    if body.size != count * n * n:
        raise FieldError(f"Snapshot body has {body.size} values, expected {count * n * n}")
    if components is None:
        components = () if count == 1 else (count,)
    return Field.wrap(Grid(n), body.reshape(components + (n, n)))


def write_snapshot(path: Path, field: Field) -> Path:
    """Write a field snapshot to ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_snapshot(field))
    return path


def read_snapshot(path: Path, components: tuple[int, ...] | None = None) -> Field:
    """Read a field snapshot from ``path``."""
    return decode_snapshot(Path(path).read_bytes(), components)


def write_field_csv(path: Path, field: Field) -> Path:
    """Export a field as rows (x1, x2, c0, c1, ...) for plotting."""
    grid = field.grid
    flat = field.values.reshape(-1, grid.n * grid.n)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x1", "x2"] + [f"c{index}" for index in range(flat.shape[0])])
        x1 = grid.x[0].ravel()
        x2 = grid.x[1].ravel()
        for point in range(grid.n * grid.n):
            writer.writerow(
                [repr(float(x1[point])), repr(float(x2[point]))]
                + [repr(float(v)) for v in flat[:, point]]
            )
    return path
