#!/usr/bin/env python3
"""Regenerate the small frozen oracle values in tests/data/golden_values.json.

Independent evaluations, no imports from the package under test:
  - photon scattering rate at 830 nm via arbitrary-precision arithmetic
  - Cs-133 recoil frequency via arbitrary-precision arithmetic
  - bound-mode count of the 0.1 W / 783 nm / 10 mm waveguide well from a
    dense finite-difference eigensolve at 4x the resolution used in tests
"""

import json
from pathlib import Path

import mpmath as mp
import numpy as np
import scipy.constants
from scipy.linalg import eigh_tridiagonal

mp.mp.dps = 50

# the exact float64 CODATA constants used at runtime, promoted to mpf
C = mp.mpf(repr(scipy.constants.c))
HBAR = mp.mpf(repr(scipy.constants.hbar))
KB = mp.mpf(repr(scipy.constants.k))
U_KG = mp.mpf(repr(scipy.constants.atomic_mass))

GAMMA = 2 * mp.pi * mp.mpf("5.89e6")
LAMBDA0 = mp.mpf("780.0e-9")


def scattering_rate_hp(lambda_l: str, intensity) -> mp.mpf:
    w0 = 2 * mp.pi * C / LAMBDA0
    wl = 2 * mp.pi * C / mp.mpf(lambda_l)
    line = GAMMA / (w0 - wl) + GAMMA / (w0 + wl)
    return (3 * mp.pi * C**2 / (2 * HBAR * w0**3)) * (wl / w0) ** 3 * line**2 * intensity


def recoil_hp(lambda0: str, mass_u: str) -> mp.mpf:
    k = 2 * mp.pi / mp.mpf(lambda0)
    return HBAR * k**2 / (2 * mp.mpf(mass_u) * U_KG)


def waveguide_bound_modes(refine: int) -> dict:
    """Transverse bound modes of the 0.1 W diode waveguide well."""
    hbar = scipy.constants.hbar
    mass = 84.911789 * scipy.constants.atomic_mass
    waist = 1e-6
    # depth from the line-focus peak intensity and the two-level response
    c = scipy.constants.c
    w0_at = 2 * np.pi * c / 780.0e-9
    wl = 2 * np.pi * c / 783e-9
    gamma = 2 * np.pi * 5.89e6
    line = gamma / (w0_at - wl) + gamma / (w0_at + wl)
    peak = 0.1 * np.sqrt(2 / np.pi) / (waist * 0.01)
    depth = (3 * np.pi * c**2 / (2 * w0_at**3)) * line * peak

    n = 6144 * refine
    x = np.linspace(-6e-6, 6e-6, n)
    v = -depth * np.exp(-2 * x**2 / waist**2)
    dx = x[1] - x[0]
    t = hbar**2 / (2 * mass * dx**2)
    bound = eigh_tridiagonal(2 * t + v, np.full(n - 1, -t), select="v",
                             select_range=(float(np.min(v)) * 1.001, 0.0),
                             eigvals_only=True)
    levels = eigh_tridiagonal(2 * t + v, np.full(n - 1, -t), select="i",
                              select_range=(0, 5), eigvals_only=True)
    return {
        "bound_count": int(len(bound)),
        "lowest_levels_J": [float(e) for e in levels],
        "depth_J": float(depth),
    }


def main():
    intensity = 2e-3 / (np.pi * 1e-12)  # peak of the 1 mW, 1 um spot
    golden = {
        "scattering_rate_830nm": {
            "wavelength_m": 830e-9,
            "intensity_W_m2": float(intensity),
            "rate_per_s": float(scattering_rate_hp("830e-9", mp.mpf(repr(intensity)))),
        },
        "recoil_cs133": {
            "lambda0_m": 852.347e-9,
            "mass_u": 132.905452,
            "omega_recoil": float(recoil_hp("852.347e-9", "132.905452")),
        },
        "waveguide_modes_4x": waveguide_bound_modes(refine=4),
        "waveguide_modes_1x": waveguide_bound_modes(refine=1),
    }
    out = Path(__file__).resolve().parents[1] / "tests" / "data" / "golden_values.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(golden, indent=2) + "\n", encoding="ascii")
    print(f"wrote {out}")
    for key, val in golden.items():
        print(" ", key, "->", val)


if __name__ == "__main__":
    main()
