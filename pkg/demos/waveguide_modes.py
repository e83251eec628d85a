#!/usr/bin/env python3
"""Transverse physics of a 10 mm line-focus waveguide.

Builds the guide potential for 0.1 W of 783 nm light focused to a 1 um
line, solves the transverse eigenproblem, and relates the level spacing
to the single-photon recoil frequency (the scale that decides whether
slow packets stay in the lowest transverse mode).
"""

import numpy as np
from scipy import constants as sc

from mtd import (
    BeamSource,
    LensletSpec,
    StraightPath,
    line_focus,
    potential_field,
    preset_species,
    recoil_frequency,
    transverse_modes,
)


def main():
    atom = preset_species("Rb-85")
    lens = LensletSpec("cylindrical", 2.21e-3, 400e-6, 1e-6)
    path = StraightPath((0, -5e-3), (0, 1), 10e-3)
    guide = potential_field(
        line_focus(BeamSource(lambdaL=783e-9, power=0.1), lens, path), atom, 783e-9)

    xi = np.linspace(-6e-6, 6e-6, 6144)
    values = np.asarray(guide.values(xi, np.zeros_like(xi), np.zeros_like(xi)))
    spectrum = transverse_modes(xi, values, atom.mass, 6)
    depth = -values.min()
    print(f"guide depth: {depth / sc.k * 1e6:.1f} uK x kB, "
          f"{spectrum.bound_count} bound transverse modes")
    print("lowest levels above the well bottom [kHz equivalent]:")
    for n, energy in enumerate(spectrum.energies):
        print(f"  n={n}: {(energy + depth) / sc.hbar / 2 / np.pi / 1e3:8.2f} kHz")
    spacing = (spectrum.energies[1] - spectrum.energies[0]) / sc.hbar
    ratio = spacing / recoil_frequency(atom)
    print(f"level spacing / recoil frequency: {ratio:.1f} "
          "(well above one: single-mode guiding of slow packets)")


if __name__ == "__main__":
    main()
