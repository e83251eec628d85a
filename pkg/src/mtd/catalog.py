"""Atom species and laser source presets.

Preset data lives in ``data/catalog.yaml``; every numerical entry there
carries a provenance note. All internal quantities are SI and all
frequencies are angular (rad/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import yaml

from .constants import CONST
from .errors import ConfigError
from .units import parse_quantity


@dataclass(frozen=True)
class AtomSpecies:
    """Two-level atom: mass, resonance wavelength and natural linewidth."""

    name: str
    mass: float      # [kg]
    lambda0: float   # resonance wavelength [m]
    gamma: float     # natural linewidth, angular [1/s]

    def __post_init__(self):
        if self.mass <= 0:
            raise ConfigError(f"atom {self.name!r}: mass must be positive")
        if self.lambda0 <= 0:
            raise ConfigError(f"atom {self.name!r}: lambda0 must be positive")
        if self.gamma <= 0:
            raise ConfigError(f"atom {self.name!r}: gamma must be positive")

    @property
    def omega0(self) -> float:
        """Resonance angular frequency [rad/s]."""
        return 2.0 * math.pi * CONST.c / self.lambda0

    @property
    def wavenumber0(self) -> float:
        """Resonance wavenumber 2 pi / lambda0 [1/m]."""
        return 2.0 * math.pi / self.lambda0


@dataclass(frozen=True)
class BeamSource:
    """A laser beam illuminating a micro-optical element.

    ``angle`` is the tilt relative to the lens-array normal; the
    polarization tag only decides whether two beams may interfere
    (equal tags) or simply add in intensity (different tags).
    """

    lambdaL: float          # laser wavelength [m]
    power: float            # total power carried per element [W]
    angle: float = 0.0      # tilt [rad]
    polarization: str = "lin-x"

    def __post_init__(self):
        if self.lambdaL <= 0:
            raise ConfigError("beam: lambdaL must be positive")
        if self.power < 0:
            raise ConfigError("beam: power must be non-negative")
        if abs(self.angle) >= math.pi / 2:
            raise ConfigError("beam: |angle| must be below pi/2")

    @property
    def omegaL(self) -> float:
        """Laser angular frequency [rad/s]."""
        return 2.0 * math.pi * CONST.c / self.lambdaL


@lru_cache(maxsize=1)
def _catalog() -> dict:
    text = resources.files("mtd.data").joinpath("catalog.yaml").read_text(encoding="utf-8")
    data = yaml.safe_load(text)
    if data.get("schema_version") != 1:
        raise ConfigError("catalog.yaml: unsupported schema_version")
    return data


def preset_species(name: str) -> AtomSpecies:
    """Look up an atom species preset by name (e.g. ``"Rb-85"``)."""
    species = _catalog()["species"]
    if name not in species:
        known = ", ".join(sorted(species))
        raise ConfigError(f"unknown species {name!r} (known: {known})")
    entry = species[name]
    return AtomSpecies(
        name=name,
        mass=parse_quantity(entry["mass"], "mass", f"species[{name}].mass"),
        lambda0=parse_quantity(
            entry["resonance_wavelength"], "length", f"species[{name}].resonance_wavelength"
        ),
        gamma=2.0
        * math.pi
        * parse_quantity(
            entry["linewidth_over_2pi"], "frequency", f"species[{name}].linewidth_over_2pi"
        ),
    )


def preset_laser(name: str) -> float:
    """Return the default wavelength [m] of a named laser source."""
    lasers = _catalog()["lasers"]
    if name not in lasers:
        known = ", ".join(sorted(lasers))
        raise ConfigError(f"unknown laser preset {name!r} (known: {known})")
    return parse_quantity(lasers[name]["wavelength"], "length", f"lasers[{name}].wavelength")
