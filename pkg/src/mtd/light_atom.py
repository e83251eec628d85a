"""Two-level-atom response to far-detuned light.

For laser angular frequency wL, atomic resonance w0 and natural
linewidth Gamma, the photon scattering rate and the dipole potential of
an atom in a field of intensity I are

    Gamma_sc = (3 pi c^2 / (2 hbar w0^3)) (wL/w0)^3
               * (Gamma/(w0 - wL) + Gamma/(w0 + wL))^2 * I

    U        = -(3 pi c^2 / (2 w0^3))
               * (Gamma/(w0 - wL) + Gamma/(w0 + wL)) * I

Both keep the counter-rotating term, so they remain usable far below
resonance (e.g. CO2-laser light on alkali atoms). They assume negligible
saturation (Gamma_sc << Gamma) and detuning large compared to Gamma;
violations are reported as warnings, never as errors.

Sign conventions: the detuning is delta = wL - w0, negative for red
detuning, in which case U < 0 (attractive).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .catalog import AtomSpecies
from .constants import CONST
from .errors import ValidityWarning, ZeroDetuningError

# thresholds for the "much greater/much less than" regime flags
MUCH_GREATER = 100.0
MUCH_LESS = 0.01

# saturation validity: warn when Gamma_sc exceeds this fraction of Gamma
SATURATION_WARN_FRACTION = 0.1


@dataclass(frozen=True)
class DetuningReport:
    """Signed detuning and validity-regime flags for a laser/atom pair."""

    delta: float                # wL - w0 [rad/s]; < 0 for red detuning
    detuning_over_linewidth: float   # |delta| / Gamma
    scattering_over_linewidth: float  # Gamma_sc / Gamma at the given intensity
    large_detuning: bool        # |delta| >> Gamma
    low_saturation: bool        # Gamma_sc << Gamma
    quasi_resonant: bool        # |delta| << w0


def _frequencies(atom: AtomSpecies, wavelength: float):
    if wavelength <= 0:
        raise ZeroDetuningError("laser wavelength must be positive")
    omega0 = atom.omega0
    omegaL = 2.0 * math.pi * CONST.c / wavelength
    return omega0, omegaL


def _line_sum(atom: AtomSpecies, omega0: float, omegaL: float) -> float:
    # Gamma/(w0 - wL) + Gamma/(w0 + wL); signed (negative for blue detuning)
    if omegaL == omega0:
        raise ZeroDetuningError(
            f"laser at {atom.name} resonance: the two-level response diverges"
        )
    return atom.gamma / (omega0 - omegaL) + atom.gamma / (omega0 + omegaL)


def scattering_rate(atom: AtomSpecies, wavelength: float, intensity) -> float | np.ndarray:
    """Photon scattering rate [1/s] at the given intensity [W/m^2].

    Scales linearly with intensity and as 1/detuning^2 close to
    resonance. Emits a ``ValidityWarning`` when the result leaves the
    low-saturation regime.
    """
    intensity = np.asarray(intensity, dtype=float)
    if np.any(intensity < 0):
        raise ValueError("intensity must be non-negative")
    omega0, omegaL = _frequencies(atom, wavelength)
    line = _line_sum(atom, omega0, omegaL)
    prefactor = 3.0 * math.pi * CONST.c**2 / (2.0 * CONST.hbar * omega0**3)
    rate = prefactor * (omegaL / omega0) ** 3 * line**2 * intensity
    if np.any(rate >= SATURATION_WARN_FRACTION * atom.gamma):
        warnings.warn(
            "scattering rate exceeds 0.1 Gamma: low-saturation model is marginal",
            ValidityWarning,
            stacklevel=2,
        )
    return rate if rate.ndim else float(rate)


def dipole_potential(atom: AtomSpecies, wavelength: float, intensity) -> float | np.ndarray:
    """Dipole potential [J] at the given intensity [W/m^2].

    Negative (attractive) for red detuning, positive for blue.
    """
    intensity = np.asarray(intensity, dtype=float)
    if np.any(intensity < 0):
        raise ValueError("intensity must be non-negative")
    omega0, omegaL = _frequencies(atom, wavelength)
    line = _line_sum(atom, omega0, omegaL)
    prefactor = 3.0 * math.pi * CONST.c**2 / (2.0 * omega0**3)
    pot = -prefactor * line * intensity
    return pot if pot.ndim else float(pot)


def detuning_report(atom: AtomSpecies, wavelength: float, intensity: float = 0.0) -> DetuningReport:
    """Signed detuning delta = wL - w0 plus validity-regime flags.

    Never raises: at zero detuning the large-detuning and
    low-saturation flags simply come out false.
    """
    omega0, omegaL = _frequencies(atom, wavelength)
    delta = omegaL - omega0
    ratio_gamma = abs(delta) / atom.gamma
    if delta == 0.0:
        sc_ratio = math.inf
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            sc_ratio = scattering_rate(atom, wavelength, intensity) / atom.gamma
    return DetuningReport(
        delta=delta,
        detuning_over_linewidth=ratio_gamma,
        scattering_over_linewidth=sc_ratio,
        large_detuning=ratio_gamma >= MUCH_GREATER,
        low_saturation=sc_ratio <= MUCH_LESS,
        quasi_resonant=abs(delta) / omega0 <= MUCH_LESS,
    )
