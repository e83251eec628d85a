"""Grid file I/O: text header plus little-endian float64 payload.

Format::

    mtdgrid 1
    shape <nx> <ny> <nz>
    axis x <lo> <hi> <spacing>
    axis y <lo> <hi> <spacing>
    axis z <lo> <hi> <spacing>
    units <tag>
    data float64 little-endian row-major
    end
    <raw binary values, C order>

Extents are in meters. 1D/2D slices can additionally be exported as CSV
for plotting.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .fields import SampledField

_MAGIC = "mtdgrid 1"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_grid(path, sampled: SampledField) -> None:
    path = Path(path)
    values = np.ascontiguousarray(sampled.values, dtype="<f8")
    header = io.StringIO()
    header.write(_MAGIC + "\n")
    header.write("shape " + " ".join(str(n) for n in values.shape) + "\n")
    for name, ax, d in zip("xyz", sampled.axes, sampled.spacing):
        header.write(f"axis {name} {_fmt(ax[0])} {_fmt(ax[-1])} {_fmt(d)}\n")
    header.write(f"units {sampled.units}\n")
    header.write("data float64 little-endian row-major\n")
    header.write("end\n")
    with open(path, "wb") as fh:
        fh.write(header.getvalue().encode("ascii"))
        fh.write(values.tobytes(order="C"))


def read_grid(path) -> SampledField:
    path = Path(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    end_marker = b"end\n"
    pos = raw.find(end_marker)
    if pos < 0 or not raw.startswith(_MAGIC.encode("ascii")):
        raise ConfigError(f"{path}: not a grid file")
    header_lines = raw[:pos].decode("ascii").splitlines()
    shape = None
    units = None
    axes = []
    spacing = []
    for line in header_lines[1:]:
        parts = line.split()
        if parts[0] == "shape":
            shape = tuple(int(p) for p in parts[1:])
        elif parts[0] == "axis":
            lo, hi, d = (float(p) for p in parts[2:5])
            axes.append((lo, hi, d))
            spacing.append(d)
        elif parts[0] == "units":
            units = " ".join(parts[1:])
    if shape is None or units is None or len(axes) != len(shape):
        raise ConfigError(f"{path}: malformed grid header")
    payload = raw[pos + len(end_marker):]
    values = np.frombuffer(payload, dtype="<f8", count=int(np.prod(shape))).reshape(shape)
    axis_arrays = tuple(
        lo + d * np.arange(n) if n > 1 else np.array([lo])
        for (lo, hi, d), n in zip(axes, shape)
    )
    return SampledField(values=values.copy(), axes=axis_arrays,
                        spacing=tuple(spacing), units=units)


def write_slice_csv(path, sampled: SampledField, axis: str = "z", index: int | None = None) -> None:
    """Write a 2D slice (or the full 1D/2D data) as CSV: x, y, value."""
    path = Path(path)
    names = "xyz"
    if axis not in names:
        raise ConfigError("slice axis must be x, y or z")
    k = names.index(axis)
    if index is None:
        index = sampled.values.shape[k] // 2
    sl = [slice(None)] * 3
    sl[k] = index
    plane = sampled.values[tuple(sl)]
    keep = [i for i in range(3) if i != k]
    ax0, ax1 = sampled.axes[keep[0]], sampled.axes[keep[1]]
    lines = [f"{names[keep[0]]}_m,{names[keep[1]]}_m,value"]
    for i, a in enumerate(ax0):
        for j, b in enumerate(ax1):
            lines.append(f"{a:.9g},{b:.9g},{plane[i, j]:.9g}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
