"""Four-port guide junctions: splitter transport runs and interferometry.

Two mirror-image curved guides (circular arcs in the focal plane)
approach to a closest gap at x = 0 and separate again, forming an
X-shaped coupler. A packet launched along one guide is evolved through
the junction in 2D (the tight axial direction is frozen out) and the
outgoing amplitude is booked into four port windows: forward/backward
on either guide, plus a remainder for anything still near the junction.

The Mach-Zehnder fringe uses the linearity of the evolution: the two
arm packets are propagated through the recombiner separately and the
port populations for an arm phase offset phi follow exactly from the
two final amplitudes and their overlap on each window.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .catalog import AtomSpecies
from .constants import CONST
from .errors import ConfigError, ConvergenceError, ValidityWarning
from .fields import ArcPath, GuidePath, StraightPath, closest_approach
from .light_atom import dipole_potential
from .wavepacket import (
    ModeSpectrum,
    UniformGrid,
    WavepacketState,
    evolve,
    make_state,
    transverse_modes,
)

POINTS_PER_WAVELENGTH = 8.25     # grid sizing versus the shortest de Broglie wavelength
PORT_OFFSET_WAISTS = 5.0         # port windows start this many waists from the junction
CLEAR_REMAINDER = 0.05           # above this, the packet has not cleared the junction
MODE_PURITY_FLOOR = 0.99


@dataclass(frozen=True)
class PortPopulations:
    """Norm fractions in the four output windows plus the remainder."""

    forward_a: float
    backward_a: float
    forward_b: float
    backward_b: float
    remainder: float

    @property
    def ports(self) -> dict:
        return {
            "forward_a": self.forward_a,
            "backward_a": self.backward_a,
            "forward_b": self.forward_b,
            "backward_b": self.backward_b,
        }

    @property
    def total(self) -> float:
        return (self.forward_a + self.backward_a + self.forward_b
                + self.backward_b + self.remainder)

    def as_dict(self) -> dict:
        d = dict(self.ports)
        d["remainder"] = self.remainder
        return d


@dataclass(frozen=True)
class JunctionSetup:
    """Two guides, their common optical parameters, and the 2D box."""

    guide_a: GuidePath
    guide_b: GuidePath
    waist: float                # transverse 1/e^2 radius of each guide [m]
    depth: float                # single-guide potential depth (positive) [J]
    box: tuple[tuple[float, float], tuple[float, float]]
    port_offset: float          # |x| where the port windows begin [m]
    split_y: float = 0.0        # y value separating guide-a from guide-b windows

    def potential_values(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        da = self.guide_a.transverse_distance(x, y)
        db = self.guide_b.transverse_distance(x, y)
        w2 = self.waist**2
        return -self.depth * (np.exp(-2.0 * da**2 / w2) + np.exp(-2.0 * db**2 / w2))

    def guide(self, name: str) -> GuidePath:
        if name == "a":
            return self.guide_a
        if name == "b":
            return self.guide_b
        raise ConfigError("input guide must be 'a' or 'b'")


def _arc_pair(gap: float, bend_radius: float, x_span: float):
    """Mirror-image arcs with closest approach ``gap`` at x = 0.

    Guide a is the lower branch of a circle centered above the axis (it
    bows down to y = +gap/2 at x = 0); guide b is its y-mirror.
    """
    if x_span >= bend_radius:
        raise ConfigError("junction x span must stay below the bend radius")
    half = math.asin(x_span / bend_radius)
    center_a = (0.0, gap / 2.0 + bend_radius)
    center_b = (0.0, -gap / 2.0 - bend_radius)
    guide_a = ArcPath(center=center_a, radius=bend_radius,
                      angle_from=-math.pi / 2.0 - half, angle_to=-math.pi / 2.0 + half)
    guide_b = ArcPath(center=center_b, radius=bend_radius,
                      angle_from=math.pi / 2.0 - half, angle_to=math.pi / 2.0 + half)
    return guide_a, guide_b


def make_junction(waist: float, depth: float, gap: float,
                  bend_radius: float = 20e-6,
                  box=((-8.8e-6, 13.6e-6), (-4.8e-6, 4.8e-6))) -> JunctionSetup:
    """X-coupler of two arc guides with the given closest-approach gap."""
    x_span = max(abs(box[0][0]), abs(box[0][1])) * 1.05
    guide_a, guide_b = _arc_pair(gap, bend_radius, x_span)
    return JunctionSetup(
        guide_a=guide_a, guide_b=guide_b, waist=waist, depth=depth,
        box=box, port_offset=PORT_OFFSET_WAISTS * waist,
    )


def waveguide_depth(atom: AtomSpecies, wavelength: float, power: float,
                    waist: float, length: float) -> float:
    """Single-guide trap depth of a cylindrical line focus [J, positive]."""
    peak = power * math.sqrt(2.0 / math.pi) / (waist * length)
    return -dipole_potential(atom, wavelength, peak)


def reference_splitter(atom: AtomSpecies) -> tuple[JunctionSetup, LaunchSpec]:
    """The documented reference coupler: 0.1 W / 783 nm / 10 mm guide
    depths, closest approach of two waists, input at five recoil
    velocities. At this gap the wells never merge, so the packet stays
    on its guide."""
    depth = waveguide_depth(atom, 783e-9, 0.1, 1e-6, 0.01)
    return make_junction(waist=1e-6, depth=depth, gap=2e-6), LaunchSpec()


def reference_recombiner(atom: AtomSpecies) -> tuple[JunctionSetup, LaunchSpec]:
    """The documented interferometer recombiner: quarter-depth guides
    whose wells just merge (gap 1.1 waists), giving genuine four-port
    splitting at five recoil velocities."""
    depth = 0.25 * waveguide_depth(atom, 783e-9, 0.1, 1e-6, 0.01)
    setup = make_junction(waist=1e-6, depth=depth, gap=1.1e-6)
    return setup, LaunchSpec(end_x=9.0e-6)


def reference_decoupled(atom: AtomSpecies) -> tuple[JunctionSetup, LaunchSpec]:
    """Two parallel guides twenty waists apart: no coupling at all."""
    depth = waveguide_depth(atom, 783e-9, 0.1, 1e-6, 0.01)
    return make_decoupled_pair(waist=1e-6, depth=depth, separation=20e-6), LaunchSpec()


def make_decoupled_pair(waist: float, depth: float, separation: float,
                        box=((-8.8e-6, 13.6e-6), (-4.8e-6, 4.8e-6))) -> JunctionSetup:
    """Two parallel straight guides too far apart to couple.

    Guide a runs along x at y = 0; guide b runs parallel at
    y = -separation. The port split line sits midway between them.
    """
    (xlo, xhi), _ = box
    length = (xhi - xlo) * 3.0
    start_x = (xlo + xhi) / 2.0 - length / 2.0
    guide_a = StraightPath(start=(start_x, 0.0), direction=(1.0, 0.0), length=length)
    guide_b = StraightPath(start=(start_x, -separation), direction=(1.0, 0.0), length=length)
    return JunctionSetup(
        guide_a=guide_a, guide_b=guide_b, waist=waist, depth=depth,
        box=box, port_offset=PORT_OFFSET_WAISTS * waist,
        split_y=-separation / 2.0,
    )


# ---------------------------------------------------------------------------
# launch parameters and grid sizing


@dataclass(frozen=True)
class LaunchSpec:
    """Input packet: which guide, how fast (in recoil velocities), and size."""

    guide: str = "a"
    speed_recoils: float = 5.0
    sigma_long: float = 0.8e-6
    start_x: float = -4.6e-6
    end_x: float = 8.0e-6


def _point_and_tangent(path: GuidePath, x: float):
    """Centerline point at horizontal position x, with forward (+x) tangent."""
    if isinstance(path, StraightPath):
        if abs(path.direction[0]) < 1e-12:
            raise ConfigError("straight guide is not parametrizable by x")
        s = (x - path.start[0]) / path.direction[0]
        px, py = path.point_at(s)
        tx, ty = path.tangent_at(s)
    elif isinstance(path, ArcPath):
        cx, cy = path.center
        cos_phi = (x - cx) / path.radius
        if abs(cos_phi) > 1.0:
            raise ConfigError("x position lies outside the arc")
        span = 2.0 * math.pi
        best = None
        for phi in (math.acos(cos_phi), -math.acos(cos_phi)):
            rel = (phi - path.angle_from) % span
            if rel <= path.angle_to - path.angle_from:
                best = phi
                break
        if best is None:
            raise ConfigError("x position lies outside the arc's angular range")
        px = cx + path.radius * math.cos(best)
        py = cy + path.radius * math.sin(best)
        tx, ty = -math.sin(best), math.cos(best)
    else:
        raise ConfigError("unsupported guide path for launching")
    if tx < 0:
        tx, ty = -tx, -ty
    norm = math.hypot(tx, ty)
    return (px, py), (tx / norm, ty / norm)


def transverse_ground_size(setup: JunctionSetup, mass: float) -> float:
    """sqrt(hbar/(m omega_r)) of one isolated guide."""
    omega_r = math.sqrt(4.0 * setup.depth / (mass * setup.waist**2))
    return math.sqrt(CONST.hbar / (mass * omega_r))


def _fast_even_size(minimum: int) -> int:
    """Smallest even 5-smooth integer >= minimum (fast FFT lengths)."""
    n = max(2, minimum + (minimum % 2))
    while True:
        m = n
        for p in (2, 3, 5):
            while m % p == 0:
                m //= p
        if m == 1:
            return n
        n += 2


def junction_grid(setup: JunctionSetup, atom: AtomSpecies, launch: LaunchSpec,
                  refine: int = 1) -> UniformGrid:
    """Grid sized to resolve the local de Broglie wavelength (8+ points).

    Along x: the launch momentum plus the packet's spectral tail plus
    any speed-up from the deepened junction region. Along y: the
    spectral tail of the transverse ground mode.
    """
    v = launch.speed_recoils * CONST.hbar * atom.wavenumber0 / atom.mass
    k_long = atom.mass * v / CONST.hbar + 4.0 / (2.0 * launch.sigma_long)
    # potential dip where the guides overlap accelerates the packet
    gap = closest_approach(setup.guide_a, setup.guide_b)
    dip = 2.0 * setup.depth * math.exp(-2.0 * (gap / 2.0) ** 2 / setup.waist**2)
    extra = max(dip - setup.depth, 0.0)
    k_x = math.sqrt(k_long**2 + 2.0 * atom.mass * extra / CONST.hbar**2)
    x_ground = transverse_ground_size(setup, atom.mass)
    k_y = 4.0 / (math.sqrt(2.0) * x_ground)

    shape = []
    for (lo, hi), k in zip(setup.box, (k_x, k_y)):
        step_max = 2.0 * math.pi / (k * POINTS_PER_WAVELENGTH)
        n = _fast_even_size(int(math.ceil((hi - lo) / step_max)) * refine)
        shape.append(n)
    return UniformGrid.from_extents(setup.box, tuple(shape))


def launch_state(setup: JunctionSetup, atom: AtomSpecies, launch: LaunchSpec,
                 grid: UniformGrid) -> WavepacketState:
    """Packet in the guide's transverse ground mode moving toward +x."""
    path = setup.guide(launch.guide)
    (px, py), (tx, ty) = _point_and_tangent(path, launch.start_x)
    v = launch.speed_recoils * CONST.hbar * atom.wavenumber0 / atom.mass
    x_ground = transverse_ground_size(setup, atom.mass)
    X, Y = grid.meshes()
    dxp = X - px
    dyp = Y - py
    along = dxp * tx + dyp * ty
    across = -dxp * ty + dyp * tx
    envelope = -(along**2) / (4.0 * launch.sigma_long**2) - across**2 / (2.0 * x_ground**2)
    phase = atom.mass * v * along / CONST.hbar
    return make_state(grid, np.exp(envelope + 1j * phase), atom.mass)


# ---------------------------------------------------------------------------
# transport through the junction


@dataclass(frozen=True)
class SplitterResult:
    populations: PortPopulations
    state: WavepacketState
    grid: UniformGrid
    dt: float
    steps: int
    params: dict = field(default_factory=dict)
    timeline: tuple = ()   # optional (time, norm, energy, populations) samples


def port_populations(setup: JunctionSetup, state: WavepacketState) -> PortPopulations:
    X, Y = state.grid.meshes()
    rho = state.density() * state.grid.cell_volume
    fwd = X > setup.port_offset
    bwd = X < -setup.port_offset
    side_a = Y > setup.split_y
    return PortPopulations(
        forward_a=float(np.sum(rho[fwd & side_a])),
        backward_a=float(np.sum(rho[bwd & side_a])),
        forward_b=float(np.sum(rho[fwd & ~side_a])),
        backward_b=float(np.sum(rho[bwd & ~side_a])),
        remainder=float(np.sum(rho[~fwd & ~bwd])),
    )


def splitter_run(setup: JunctionSetup, atom: AtomSpecies,
                 launch: LaunchSpec = LaunchSpec(),
                 refine_space: int = 1, refine_time: int = 1,
                 raise_on_uncleared: bool = True,
                 samples: int = 0) -> SplitterResult:
    """Propagate a packet through the junction and book the port norms.

    The total time is fixed by the launch geometry (start to end
    position at the launch speed), so runs at different resolutions are
    directly comparable. ``refine_space``/``refine_time`` multiply the
    grid density and step count for convergence studies. With
    ``samples`` > 0 the run is chunked and a (time, norm, energy,
    populations) timeline is recorded.
    """
    grid = junction_grid(setup, atom, launch, refine=refine_space)
    state = launch_state(setup, atom, launch, grid)
    v = launch.speed_recoils * CONST.hbar * atom.wavenumber0 / atom.mass
    total_time = (launch.end_x - launch.start_x) / v
    if total_time <= 0:
        raise ConfigError("launch end position must lie beyond the start")
    X, Y = grid.meshes()
    v_grid = setup.potential_values(X, Y)
    dt_max = 0.98 * (math.pi / 4.0) * CONST.hbar / float(np.max(np.abs(v_grid)))
    steps = int(math.ceil(total_time / dt_max)) * refine_time
    dt = total_time / steps

    timeline = []
    if samples > 0:
        from .wavepacket import total_energy

        chunk = max(steps // samples, 1)
        done = 0
        while done < steps:
            n = min(chunk, steps - done)
            state = evolve(state, v_grid, dt, n, check=(done == 0))
            done += n
            timeline.append((state.time, state.norm(), total_energy(state, v_grid),
                             port_populations(setup, state)))
    else:
        state = evolve(state, v_grid, dt, steps)
    pops = port_populations(setup, state)
    if raise_on_uncleared and pops.remainder > CLEAR_REMAINDER:
        raise ConvergenceError(
            f"packet not cleared: remainder {pops.remainder:.3g} after {steps} steps"
        )
    return SplitterResult(
        populations=pops, state=state, grid=grid, dt=dt, steps=steps,
        timeline=tuple(timeline),
        params={
            "guide": launch.guide,
            "speed_recoils": launch.speed_recoils,
            "sigma_long_m": launch.sigma_long,
            "start_x_m": launch.start_x,
            "end_x_m": launch.end_x,
            "refine_space": refine_space,
            "refine_time": refine_time,
            "shape": list(grid.shape),
        },
    )


# ---------------------------------------------------------------------------
# interferometer fringe via linear superposition


@dataclass(frozen=True)
class FringeResult:
    phases: np.ndarray
    populations: dict          # port name -> array over phases
    fit: dict                  # port name -> (offset, amplitude, phase0, residual)
    visibility: dict           # port name -> contrast
    mode_purity: float


def guide_mode_purity(setup: JunctionSetup, mass: float, n_points: int = 2048) -> float:
    """Overlap of the launched transverse mode with the true guide mode.

    Solves the 1D transverse eigenproblem of one isolated guide and
    projects the harmonic ground state used for launching onto it.
    """
    half_width = 6.0 * setup.waist
    xi = np.linspace(-half_width, half_width, n_points)
    v = -setup.depth * np.exp(-2.0 * xi**2 / setup.waist**2)
    spectrum: ModeSpectrum = transverse_modes(xi, v, mass, 1, with_vectors=True)
    mode = spectrum.vectors[:, 0]
    mode = mode / math.sqrt(float(np.sum(mode**2)))
    omega_r = math.sqrt(4.0 * setup.depth / (mass * setup.waist**2))
    x_ground = math.sqrt(CONST.hbar / (mass * omega_r))
    harmonic = np.exp(-(xi**2) / (2.0 * x_ground**2))
    harmonic = harmonic / math.sqrt(float(np.sum(harmonic**2)))
    return float(np.sum(mode * harmonic)) ** 2


def _window_masks(setup: JunctionSetup, grid: UniformGrid) -> dict:
    X, Y = grid.meshes()
    fwd = X > setup.port_offset
    bwd = X < -setup.port_offset
    side_a = Y > setup.split_y
    return {
        "forward_a": fwd & side_a,
        "backward_a": bwd & side_a,
        "forward_b": fwd & ~side_a,
        "backward_b": bwd & ~side_a,
    }


def interferometer_fringe(setup: JunctionSetup, atom: AtomSpecies,
                          phases: np.ndarray,
                          launch: LaunchSpec = LaunchSpec(),
                          refine_space: int = 1, refine_time: int = 1) -> FringeResult:
    """Recombiner output populations versus the phase applied to arm b.

    The two arm packets (one per guide, equal weight) are propagated
    through the junction separately; because the evolution is linear,
    the output for arm phase phi is (psi_a + e^{i phi} psi_b)/sqrt(2)
    and every port population is exactly sinusoidal in phi.
    """
    purity = guide_mode_purity(setup, atom.mass)
    if purity < MODE_PURITY_FLOOR:
        warnings.warn(
            f"multimode contamination: launched mode purity {purity:.4f} < {MODE_PURITY_FLOOR}",
            ValidityWarning,
            stacklevel=2,
        )
    run_a = splitter_run(setup, atom, launch=LaunchSpec(
        guide="a", speed_recoils=launch.speed_recoils,
        sigma_long=launch.sigma_long, start_x=launch.start_x, end_x=launch.end_x),
        refine_space=refine_space, refine_time=refine_time, raise_on_uncleared=False)
    run_b = splitter_run(setup, atom, launch=LaunchSpec(
        guide="b", speed_recoils=launch.speed_recoils,
        sigma_long=launch.sigma_long, start_x=launch.start_x, end_x=launch.end_x),
        refine_space=refine_space, refine_time=refine_time, raise_on_uncleared=False)

    grid = run_a.grid
    dv = grid.cell_volume
    masks = _window_masks(setup, grid)
    phases = np.asarray(phases, dtype=float)
    populations = {}
    fit = {}
    visibility = {}
    psi_a = run_a.state.psi
    psi_b = run_b.state.psi
    for name, mask in masks.items():
        pa = float(np.sum(np.abs(psi_a[mask]) ** 2)) * dv
        pb = float(np.sum(np.abs(psi_b[mask]) ** 2)) * dv
        cross = complex(np.sum(np.conj(psi_a[mask]) * psi_b[mask]) * dv)
        offset = 0.5 * (pa + pb)
        pop = offset + np.real(np.exp(1j * phases) * cross)
        populations[name] = pop
        amplitude = abs(cross)
        # Re(e^{i phi} C) = |C| cos(phi + arg C)
        phase0 = math.atan2(cross.imag, cross.real) if amplitude > 0 else 0.0
        residual = float(np.max(np.abs(
            pop - (offset + amplitude * np.cos(phases + phase0))
        ))) if len(phases) else 0.0
        fit[name] = (offset, amplitude, phase0, residual)
        visibility[name] = amplitude / offset if offset > 1e-9 else 0.0
    return FringeResult(phases=phases, populations=populations, fit=fit,
                        visibility=visibility, mode_purity=purity)


# ---------------------------------------------------------------------------
# enclosed loop area


def interferometer_area(loop_points) -> float:
    """Enclosed area of a closed loop polyline (shoelace formula) [m^2].

    The loop must return to its starting point; a repeated final vertex
    is accepted and dropped.
    """
    pts = np.asarray(loop_points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ConfigError("loop needs at least three 2D vertices")
    scale = float(np.max(np.abs(pts))) or 1.0
    if np.allclose(pts[0], pts[-1], atol=1e-12 * scale):
        pts = pts[:-1]
    else:
        raise ConfigError("non-closed loop: the last vertex must repeat the first")
    if len(pts) < 3:
        return 0.0
    x = pts[:, 0]
    y = pts[:, 1]
    return 0.5 * abs(float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)))


def loop_from_arms(segments) -> np.ndarray:
    """Join arm polylines end-to-start into one closed loop vertex list."""
    if not segments:
        raise ConfigError("no arm segments given")
    arms = [np.asarray(s, dtype=float) for s in segments]
    scale = max(float(np.max(np.abs(a))) for a in arms) or 1.0
    points = [arms[0][0]]
    for arm in arms:
        if not np.allclose(points[-1], arm[0], atol=1e-9 * scale):
            raise ConfigError("non-closed loop: arm segments do not connect")
        points.extend(arm[1:])
    if not np.allclose(points[0], points[-1], atol=1e-9 * scale):
        raise ConfigError("non-closed loop: arms do not return to the start")
    return np.asarray(points)
