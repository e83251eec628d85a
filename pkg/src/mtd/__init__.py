"""mtd: dipole traps, matter-wave guides and interferometers from microlens light fields.

A numpy/scipy toolkit that models the intensity distributions of
micro-optical elements (spherical and cylindrical lenslets, arrays,
curved and ring guides, guide couplers), converts them into two-level
dipole potentials and photon-scattering rates, characterizes the
resulting traps and waveguides, and propagates matter-wave packets
through guides, beam splitters and interferometer geometries with a
spectral split-step solver.
"""

__version__ = "0.1.0"

from .catalog import AtomSpecies, BeamSource, preset_laser, preset_species
from .constants import CONST, PhysicalConstants
from .errors import (
    ConfigError,
    ConvergenceError,
    FlatPotentialError,
    GeometryWarning,
    GridTooCoarseError,
    MtdError,
    NodeBudgetError,
    NotATrapError,
    NumericsError,
    PhysicsError,
    ResolutionWarning,
    ValidityWarning,
    ZeroDetuningError,
)
from .fields import (
    ArcPath,
    ArraySpec,
    GridSpec,
    LensletSpec,
    RingPath,
    SampledField,
    ScalarField,
    StraightPath,
    array_field,
    dual_beam_array,
    dual_beam_shift,
    line_focus,
    sample,
    spherical_focus,
    splitter_field,
)
from .gridio import read_grid, write_grid, write_slice_csv
from .junction import (
    FringeResult,
    JunctionSetup,
    LaunchSpec,
    PortPopulations,
    SplitterResult,
    interferometer_area,
    interferometer_fringe,
    loop_from_arms,
    make_decoupled_pair,
    make_junction,
    splitter_run,
)
from .light_atom import DetuningReport, detuning_report, dipole_potential, scattering_rate
from .scene import OpticalScene, load_scene, loads_scene, serialize_scene
from .traps import (
    LambDicke,
    TrapCharacterization,
    TrapRowSpec,
    characterize_row,
    characterize_trap,
    doppler_energy,
    find_minimum,
    ground_state_size,
    harmonic_frequencies,
    lamb_dicke_check,
    potential_field,
    recoil_frequency,
    table_report,
    trap_depth,
)
from .wavepacket import (
    ModeSpectrum,
    UniformGrid,
    WavepacketState,
    evolve,
    init_gaussian,
    make_state,
    total_energy,
    transverse_modes,
)
