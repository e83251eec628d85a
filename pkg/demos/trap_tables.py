#!/usr/bin/env python3
"""Characterize the bundled trap and waveguide configurations.

Walks the full chain for each row of the bundled tables: Gaussian focus
model -> dipole potential -> minimum search -> harmonic analysis ->
ground-state sizes, Lamb-Dicke check and photon scattering rate, and
prints the model values next to the bundled two-significant-figure
reference entries.

The near-resonant (783 nm) rows agree with the references to about 10%
(traps) and 20% (guides). The far-detuned reference entries sit roughly
a factor of two above any evaluation of the two-level response at the
stated powers and spot sizes; see the README section on reference-table
deviations before trusting those rows.
"""

from importlib import resources

from mtd import preset_species, table_report
from mtd.reports import load_rows


def show(rows_name: str, depth_unit: str, depth_scale: float):
    atom = preset_species("Rb-85")
    with resources.as_file(resources.files("mtd.data") / rows_name) as path:
        rows, _ = load_rows(path)
    print(f"\n=== {rows_name} ===")
    header = (f"{'label':18s} {'depth [' + depth_unit + ']':>14s} {'ref':>8s} "
              f"{'omega_r':>11s} {'ref':>9s} {'rate [1/s]':>12s} {'ref':>9s}")
    print(header)
    for entry in table_report(atom, rows):
        print(f"{entry['label']:18s} "
              f"{entry['depth_K'] * depth_scale:14.3g} {entry['ref_depth'] / 1.380649e-23 * depth_scale:8.3g} "
              f"{entry['omega_r']:11.3g} {entry['ref_omega_r']:9.3g} "
              f"{entry['scattering_rate']:12.3g} {entry['ref_scattering_rate']:9.3g}")
        deltas = {k.replace("delta_", "").replace("_pct", ""): v
                  for k, v in entry.items() if k.startswith("delta_")}
        print("    deltas vs reference [%]: " +
              "  ".join(f"{k}={v:+.1f}" for k, v in sorted(deltas.items())))


if __name__ == "__main__":
    show("tableI.rows", "mK", 1e3)
    show("tableII.rows", "uK", 1e6)
