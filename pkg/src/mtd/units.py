"""Parsing of unit-suffixed quantity strings ("1 mW", "780 nm", "5 deg").

All quantities are converted to SI on parse. A quantity is either a bare
number (already SI) or a string "<number> <unit>". Each call site states
the expected dimension so that mismatched units are rejected with a clear
message.
"""

from __future__ import annotations

import math

from .constants import ATOMIC_MASS_UNIT
from .errors import ConfigError

# unit name -> (dimension, factor to SI)
_UNITS = {
    # length
    "m": ("length", 1.0),
    "cm": ("length", 1e-2),
    "mm": ("length", 1e-3),
    "um": ("length", 1e-6),
    "µm": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "pm": ("length", 1e-12),
    # power
    "W": ("power", 1.0),
    "kW": ("power", 1e3),
    "mW": ("power", 1e-3),
    "uW": ("power", 1e-6),
    "µW": ("power", 1e-6),
    "nW": ("power", 1e-9),
    # time
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "µs": ("time", 1e-6),
    "ns": ("time", 1e-9),
    # angle
    "rad": ("angle", 1.0),
    "mrad": ("angle", 1e-3),
    "deg": ("angle", math.pi / 180.0),
    # angular frequency
    "rad/s": ("angular_frequency", 1.0),
    "1/s": ("angular_frequency", 1.0),
    "krad/s": ("angular_frequency", 1e3),
    "Mrad/s": ("angular_frequency", 1e6),
    "Grad/s": ("angular_frequency", 1e9),
    # ordinary frequency (converted to angular where the caller says so)
    "Hz": ("frequency", 1.0),
    "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6),
    "GHz": ("frequency", 1e9),
    "THz": ("frequency", 1e12),
    # mass
    "kg": ("mass", 1.0),
    "u": ("mass", ATOMIC_MASS_UNIT),
    # energy / temperature-equivalent
    "J": ("energy", 1.0),
    "K": ("temperature", 1.0),
    "mK": ("temperature", 1e-3),
    "uK": ("temperature", 1e-6),
    "µK": ("temperature", 1e-6),
    "nK": ("temperature", 1e-9),
    # velocity
    "m/s": ("velocity", 1.0),
    "cm/s": ("velocity", 1e-2),
    "mm/s": ("velocity", 1e-3),
    "um/s": ("velocity", 1e-6),
    # intensity
    "W/m^2": ("intensity", 1.0),
    "W/cm^2": ("intensity", 1e4),
    "mW/cm^2": ("intensity", 10.0),
}


def parse_quantity(value, dimension: str, field: str = "value") -> float:
    """Return the SI value of ``value``, checked against ``dimension``.

    Bare numbers are taken to be SI already. Strings must carry a unit
    whose dimension matches.
    """
    if isinstance(value, bool):
        raise ConfigError(f"{field}: expected a quantity, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{field}: expected number or 'number unit' string, got {type(value).__name__}")
    parts = value.strip().split()
    if len(parts) == 1:
        try:
            return float(parts[0])
        except ValueError:
            raise ConfigError(f"{field}: cannot parse quantity {value!r}") from None
    if len(parts) != 2:
        raise ConfigError(f"{field}: cannot parse quantity {value!r}")
    num, unit = parts
    try:
        magnitude = float(num)
    except ValueError:
        raise ConfigError(f"{field}: cannot parse number in {value!r}") from None
    if unit not in _UNITS:
        raise ConfigError(f"{field}: unknown unit {unit!r} in {value!r}")
    dim, factor = _UNITS[unit]
    if dim != dimension and not (dimension == "angular_frequency" and dim == "frequency"):
        raise ConfigError(
            f"{field}: unit {unit!r} has dimension {dim}, expected {dimension}"
        )
    if dimension == "angular_frequency" and dim == "frequency":
        # ordinary frequency given where an angular one is expected
        return 2.0 * math.pi * magnitude * factor
    return magnitude * factor


def parse_point(value, field: str = "point", dim: int = 3) -> tuple[float, ...]:
    """Parse a coordinate list of length quantities into an SI tuple."""
    if not isinstance(value, (list, tuple)) or len(value) != dim:
        raise ConfigError(f"{field}: expected a list of {dim} coordinates")
    return tuple(parse_quantity(v, "length", f"{field}[{i}]") for i, v in enumerate(value))
