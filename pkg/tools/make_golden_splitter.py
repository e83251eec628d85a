#!/usr/bin/env python3
"""Regenerate tests/data/golden_splitter.json from refined transport runs.

Runs the reference coupler and the reference recombiner at twice the
spatial and temporal resolution of the test configuration and freezes
the resulting port populations and fringe coefficients. Expect roughly
twenty minutes of runtime.
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from mtd import preset_species
from mtd.junction import (
    interferometer_fringe,
    reference_recombiner,
    reference_splitter,
    splitter_run,
)

REFINE = 2
GOLDEN_PATH = Path(__file__).resolve().parents[1] / "tests" / "data" / "golden_splitter.json"


def refined_splitter(atom) -> dict:
    setup, launch = reference_splitter(atom)
    t0 = time.time()
    run = splitter_run(setup, atom, launch, refine_space=REFINE, refine_time=REFINE)
    print(f"reference splitter (refined): {time.time() - t0:.0f}s, "
          f"shape={run.grid.shape}, steps={run.steps}")
    return {
        "refine_space": REFINE,
        "refine_time": REFINE,
        "populations": run.populations.as_dict(),
        "params": run.params,
    }


def refined_fringe(atom) -> dict:
    setup, launch = reference_recombiner(atom)
    phases = np.linspace(0.0, 2.0 * np.pi, 33)
    t0 = time.time()
    fringe = interferometer_fringe(setup, atom, phases, launch,
                                   refine_space=REFINE, refine_time=REFINE)
    print(f"recombiner fringe (refined): {time.time() - t0:.0f}s")
    return {
        "refine_space": REFINE,
        "refine_time": REFINE,
        "mode_purity": fringe.mode_purity,
        "fit": {port: {"offset": fit[0], "amplitude": fit[1], "phase0": fit[2]}
                for port, fit in fringe.fit.items()},
        "visibility": fringe.visibility,
        "populations_at_zero_phase": {port: float(pop[0])
                                      for port, pop in fringe.populations.items()},
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--only", choices=["splitter", "fringe", "all"], default="all")
    args = parser.parse_args()

    atom = preset_species("Rb-85")
    out = json.loads(GOLDEN_PATH.read_text()) if GOLDEN_PATH.exists() else {}
    if args.only in ("splitter", "all"):
        out["reference_splitter"] = refined_splitter(atom)
    if args.only in ("fringe", "all"):
        out["recombiner_fringe"] = refined_fringe(atom)
    GOLDEN_PATH.write_text(json.dumps(out, indent=2) + "\n", encoding="ascii")
    print(f"wrote {GOLDEN_PATH}")


if __name__ == "__main__":
    main()
