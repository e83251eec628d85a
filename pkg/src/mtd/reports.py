"""Row-file loading and report serialization for trap/waveguide tables.

A rows file is a small YAML document listing laser configurations to
characterize, optionally with published reference values to compare
against. Reports are written as CSV and JSON with all floating-point
numbers fixed to nine significant digits so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import yaml

from .constants import CONST
from .errors import ConfigError
from .traps import TrapRowSpec
from .units import parse_quantity

_REFERENCE_DIMENSIONS = {
    "depth": "temperature",           # published as E / kB
    "omega_r": "angular_frequency",
    "omega_z": "angular_frequency",
    "x_r": "length",
    "x_z": "length",
    "scattering_rate": "angular_frequency",
}


def load_rows(path) -> tuple[list[TrapRowSpec], dict]:
    """Parse a rows file into row specs plus report metadata."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"rows file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"rows file parse error: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict) or data.get("schema_version") != 1:
        raise ConfigError(f"{path}: rows file needs schema_version: 1")
    geometry = data.get("report", "spots")
    if geometry not in ("spots", "guides"):
        raise ConfigError(f"{path}: report must be 'spots' or 'guides'")
    meta = {
        "report": geometry,
        "depth_scale": data.get("depth_scale", "mK" if geometry == "spots" else "uK"),
    }
    default_length = data.get("length")
    rows = []
    for i, node in enumerate(data.get("rows", [])):
        where = f"rows[{i}]"
        if not isinstance(node, dict):
            raise ConfigError(f"{where}: must be a mapping")
        reference = None
        if "reference" in node:
            reference = {}
            for key, value in node["reference"].items():
                if key not in _REFERENCE_DIMENSIONS:
                    raise ConfigError(f"{where}.reference: unknown column {key!r}")
                si = parse_quantity(value, _REFERENCE_DIMENSIONS[key],
                                    f"{where}.reference.{key}")
                if key == "depth":
                    si *= CONST.kB
                reference[key] = si
        length = node.get("length", default_length)
        rows.append(TrapRowSpec(
            label=str(node.get("label", f"row{i}")),
            wavelength=parse_quantity(node["wavelength"], "length", f"{where}.wavelength"),
            power=parse_quantity(node["power"], "power", f"{where}.power"),
            focal_size=parse_quantity(node["focal_size"], "length", f"{where}.focal_size"),
            geometry="spot" if geometry == "spots" else "guide",
            length=(parse_quantity(length, "length", f"{where}.length")
                    if length is not None else None),
            reference=reference,
        ))
    return rows, meta


# ---------------------------------------------------------------------------
# deterministic serialization


def fmt9(x) -> str:
    """Fixed nine-significant-digit representation."""
    return f"{float(x):.9g}"


def round9(obj):
    """Recursively clamp floats to nine significant digits (for JSON)."""
    if isinstance(obj, float):
        return float(fmt9(obj))
    if isinstance(obj, dict):
        return {k: round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round9(v) for v in obj]
    return obj


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(round9(payload), indent=2, sort_keys=True) + "\n",
                          encoding="ascii")


_SCALE = {"mK": 1e3, "uK": 1e6, "nK": 1e9, "K": 1.0}

_BASE_COLUMNS = [
    ("label", None),
    ("geometry", None),
    ("wavelength_nm", 1e9),
    ("power_W", 1.0),
    ("focal_size_um", 1e6),
    ("length_mm", 1e3),
    ("omega_r", 1.0),
    ("omega_z", 1.0),
    ("x_r_nm", 1e9),
    ("x_z_nm", 1e9),
    ("scattering_rate", 1.0),
    ("single_mode_ratio", 1.0),
    ("lamb_dicke_ok", None),
    ("above_doppler", None),
]

_SOURCE_KEYS = {
    "wavelength_nm": "wavelength_m",
    "power_W": "power_W",
    "focal_size_um": "focal_size_m",
    "length_mm": "length_m",
    "x_r_nm": "x_r_m",
    "x_z_nm": "x_z_m",
    "scattering_rate": "scattering_rate",
}


def report_table_rows(entries: list[dict], depth_scale: str = "mK") -> tuple[list[str], list[list[str]]]:
    """Flatten report entries into header + formatted cell rows.

    Reference columns are reported in the same units as the matching
    model column (depth in the chosen temperature scale, sizes in nm).
    """
    if depth_scale not in _SCALE:
        raise ConfigError(f"unknown depth scale {depth_scale!r}")
    depth_col = f"depth_{depth_scale}"
    ref_units = {
        "ref_depth": (f"ref_depth_{depth_scale}", _SCALE[depth_scale] / CONST.kB),
        "ref_x_r": ("ref_x_r_nm", 1e9),
        "ref_x_z": ("ref_x_z_nm", 1e9),
        "ref_omega_r": ("ref_omega_r", 1.0),
        "ref_omega_z": ("ref_omega_z", 1.0),
        "ref_scattering_rate": ("ref_scattering_rate", 1.0),
    }
    ref_keys = sorted({k for e in entries for k in e if k.startswith("ref_")})
    delta_keys = sorted({k for e in entries for k in e if k.startswith("delta_")})
    header = [name for name, _ in _BASE_COLUMNS[:6]] + [depth_col] + \
        [name for name, _ in _BASE_COLUMNS[6:]] + \
        [ref_units[k][0] for k in ref_keys] + delta_keys
    table = []
    for e in entries:
        cells = []
        for name, key in zip(header, [n for n, _ in _BASE_COLUMNS[:6]] + [depth_col]
                             + [n for n, _ in _BASE_COLUMNS[6:]] + ref_keys + delta_keys):
            if key == depth_col:
                cells.append(fmt9(e["depth_K"] * _SCALE[depth_scale]))
                continue
            if key in ("label", "geometry"):
                cells.append(str(e[key]))
                continue
            if key in ("lamb_dicke_ok", "above_doppler"):
                cells.append(str(bool(e[key])).lower())
                continue
            if key in ref_units:
                value = e.get(key)
                cells.append("" if value is None else fmt9(value * ref_units[key][1]))
                continue
            source = _SOURCE_KEYS.get(key, key)
            value = e.get(source)
            if value is None:
                cells.append("")
                continue
            factor = dict(_BASE_COLUMNS).get(key, 1.0) or 1.0
            cells.append(fmt9(value * factor))
        table.append(cells)
    return header, table


def write_report_csv(path, entries: list[dict], depth_scale: str = "mK") -> None:
    header, table = report_table_rows(entries, depth_scale)
    lines = [",".join(header)] + [",".join(row) for row in table]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_report_json(path, entries: list[dict], meta: dict) -> None:
    write_json(path, {"meta": meta, "rows": entries})
