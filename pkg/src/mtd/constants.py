"""Physical constants (CODATA values via scipy)."""

from dataclasses import dataclass

from scipy import constants as _codata


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = _codata.c          # speed of light [m/s]
    hbar: float = _codata.hbar    # reduced Planck constant [J s]
    kB: float = _codata.k         # Boltzmann constant [J/K]


CONST = PhysicalConstants()

ATOMIC_MASS_UNIT = _codata.atomic_mass  # [kg]
