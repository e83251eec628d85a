#!/usr/bin/env python3
"""Transport a matter-wave packet through guide couplers.

Two experiments, each a genuine 2D split-step run (about a minute per
run on a laptop):

1. The reference coupler (two-waist gap): the wells never merge, the
   packet rides through on its own guide.
2. A gap sweep across the well-merging threshold: once the two wells
   merge at closest approach, the packet switches guides; near the
   threshold it genuinely splits into several output ports.
"""

import time

from mtd import preset_species
from mtd.junction import (
    LaunchSpec,
    make_junction,
    reference_splitter,
    splitter_run,
    waveguide_depth,
)


def show(tag, pops):
    print(f"  {tag}: A-> {pops.forward_a:.4f}  B-> {pops.forward_b:.4f}  "
          f"<-A {pops.backward_a:.1e}  <-B {pops.backward_b:.1e}  "
          f"near junction {pops.remainder:.4f}")


def main():
    atom = preset_species("Rb-85")

    print("reference coupler (gap = two waists, full guide depth):")
    setup, launch = reference_splitter(atom)
    t0 = time.time()
    result = splitter_run(setup, atom, launch)
    show(f"{time.time() - t0:4.0f} s", result.populations)

    print("gap sweep at quarter depth (wells merge below about 1.2 waists):")
    depth = 0.25 * waveguide_depth(atom, 783e-9, 0.1, 1e-6, 0.01)
    for gap_waists in (1.3, 1.1, 1.05, 1.0):
        setup = make_junction(waist=1e-6, depth=depth, gap=gap_waists * 1e-6)
        t0 = time.time()
        result = splitter_run(setup, atom, LaunchSpec(end_x=9e-6),
                              raise_on_uncleared=False)
        show(f"gap {gap_waists:4.2f} w0 [{time.time() - t0:3.0f} s]", result.populations)


if __name__ == "__main__":
    main()
