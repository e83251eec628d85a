import json
from pathlib import Path

import numpy as np
import pytest

from mtd import preset_species

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def rb85():
    return preset_species("Rb-85")


@pytest.fixture(scope="session")
def golden_values():
    return json.loads((DATA_DIR / "golden_values.json").read_text())


@pytest.fixture(scope="session")
def golden_splitter():
    return json.loads((DATA_DIR / "golden_splitter.json").read_text())


# The 2D transport runs below take a minute or two each; they are shared
# between the junction tests and the acceptance suite.


@pytest.fixture(scope="session")
def reference_run(rb85):
    from mtd.junction import reference_splitter, splitter_run

    setup, launch = reference_splitter(rb85)
    return splitter_run(setup, rb85, launch), setup, launch


@pytest.fixture(scope="session")
def mirrored_run(rb85, reference_run):
    from dataclasses import replace

    from mtd.junction import splitter_run

    _, setup, launch = reference_run
    return splitter_run(setup, rb85, replace(launch, guide="b"))


@pytest.fixture(scope="session")
def decoupled_run(rb85):
    from mtd.junction import reference_decoupled, splitter_run

    setup, launch = reference_decoupled(rb85)
    return splitter_run(setup, rb85, launch), setup


@pytest.fixture(scope="session")
def fringe_result(rb85):
    from mtd.junction import interferometer_fringe, reference_recombiner

    setup, launch = reference_recombiner(rb85)
    phases = np.linspace(0.0, 2.0 * np.pi, 33)
    return interferometer_fringe(setup, rb85, phases, launch), phases
