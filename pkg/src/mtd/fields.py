"""Analytic intensity fields of microlens foci, arrays and guides.

Geometry conventions: the illuminating light propagates along +z, lens
arrays and guide centerlines live in the x-y (focal) plane. Every focus
is modelled as a Gaussian of 1/e^2 waist equal to the lenslet focal
size, with the Rayleigh-range axial dependence of a Gaussian beam.
Superpositions are incoherent: intensities add.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .catalog import BeamSource
from .errors import ConfigError, GeometryWarning, NodeBudgetError

INTENSITY_UNITS = "W/m^2"
POTENTIAL_UNITS = "J"

DEFAULT_NODE_BUDGET = 20_000_000
NODE_BUDGET_ENV = "MTD_NODE_BUDGET"


# ---------------------------------------------------------------------------
# element specifications


@dataclass(frozen=True)
class LensletSpec:
    """A single micro-lens: focal length, aperture and focal spot size."""

    kind: str                 # "spherical" or "cylindrical"
    focal_length: float       # [m]
    aperture: float           # lenslet diameter or lateral size [m]
    focal_size: float         # 1/e^2 waist of the modelled focus [m]

    def __post_init__(self):
        if self.kind not in ("spherical", "cylindrical"):
            raise ConfigError(f"lenslet kind must be spherical or cylindrical, got {self.kind!r}")
        for name in ("focal_length", "aperture", "focal_size"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"lenslet {name} must be positive")

    @property
    def numerical_aperture(self) -> float:
        return math.sin(math.atan(self.aperture / (2.0 * self.focal_length)))


@dataclass(frozen=True)
class ArraySpec:
    """Regular lattice of identical lenslets."""

    lattice: str              # "rectangular" or "hexagonal"
    pitch: float              # [m]
    counts: tuple[int, int]

    def __post_init__(self):
        if self.lattice not in ("rectangular", "hexagonal"):
            raise ConfigError(f"lattice must be rectangular or hexagonal, got {self.lattice!r}")
        if self.pitch <= 0:
            raise ConfigError("array pitch must be positive")
        if len(self.counts) != 2 or any(int(n) < 1 for n in self.counts):
            raise ConfigError("array counts must be a pair of integers >= 1")
        object.__setattr__(self, "counts", (int(self.counts[0]), int(self.counts[1])))

    def sites(self, center=(0.0, 0.0)) -> np.ndarray:
        """Lattice site coordinates, shape (N, 2), centered on ``center``."""
        nx, ny = self.counts
        ii = np.arange(nx) - (nx - 1) / 2.0
        jj = np.arange(ny) - (ny - 1) / 2.0
        if self.lattice == "rectangular":
            xs = ii[:, None] * self.pitch + np.zeros_like(jj)[None, :]
            ys = np.zeros_like(ii)[:, None] + jj[None, :] * self.pitch
        else:
            # hexagonal: rows spaced by sqrt(3)/2 pitch, odd rows offset
            row_offset = (np.arange(ny) % 2) * (self.pitch / 2.0)
            xs = ii[:, None] * self.pitch + row_offset[None, :]
            ys = np.zeros_like(ii)[:, None] + jj[None, :] * (self.pitch * math.sqrt(3.0) / 2.0)
        pts = np.stack([xs.ravel(), ys.ravel()], axis=1)
        return pts + np.asarray(center, dtype=float)[None, :]


# ---------------------------------------------------------------------------
# guide centerlines (in the focal plane)


@dataclass(frozen=True)
class StraightPath:
    """Finite straight segment: start point, unit direction, length."""

    start: tuple[float, float]
    direction: tuple[float, float]
    length: float

    def __post_init__(self):
        if self.length <= 0:
            raise ConfigError("straight path length must be positive")
        d = np.asarray(self.direction, dtype=float)
        n = float(np.hypot(*d))
        if n == 0:
            raise ConfigError("straight path direction must be non-zero")
        object.__setattr__(self, "direction", (float(d[0] / n), float(d[1] / n)))
        object.__setattr__(self, "start", (float(self.start[0]), float(self.start[1])))

    def transverse_distance(self, x, y):
        px = np.asarray(x, dtype=float) - self.start[0]
        py = np.asarray(y, dtype=float) - self.start[1]
        t = np.clip(px * self.direction[0] + py * self.direction[1], 0.0, self.length)
        return np.hypot(px - t * self.direction[0], py - t * self.direction[1])

    def point_at(self, s):
        return (
            self.start[0] + s * self.direction[0],
            self.start[1] + s * self.direction[1],
        )

    def tangent_at(self, s):
        return self.direction


@dataclass(frozen=True)
class ArcPath:
    """Circular arc from angle_from to angle_to (radians, counterclockwise)."""

    center: tuple[float, float]
    radius: float
    angle_from: float
    angle_to: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError("arc radius must be positive")
        if not self.angle_to > self.angle_from:
            raise ConfigError("arc requires angle_to > angle_from")
        if self.angle_to - self.angle_from > 2.0 * math.pi + 1e-12:
            raise ConfigError("arc span cannot exceed a full turn")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def length(self) -> float:
        return self.radius * (self.angle_to - self.angle_from)

    def transverse_distance(self, x, y):
        px = np.asarray(x, dtype=float) - self.center[0]
        py = np.asarray(y, dtype=float) - self.center[1]
        rho = np.hypot(px, py)
        phi = np.arctan2(py, px)
        rel = np.mod(phi - self.angle_from, 2.0 * math.pi)
        span = self.angle_to - self.angle_from
        on_arc = rel <= span
        d_radial = np.abs(rho - self.radius)
        # off the angular range: distance to the nearer endpoint
        ax, ay = self.point_at(0.0)
        bx, by = self.point_at(self.length)
        d_ends = np.minimum(np.hypot(px + self.center[0] - ax, py + self.center[1] - ay),
                            np.hypot(px + self.center[0] - bx, py + self.center[1] - by))
        return np.where(on_arc, d_radial, d_ends)

    def point_at(self, s):
        phi = self.angle_from + s / self.radius
        return (
            self.center[0] + self.radius * math.cos(phi),
            self.center[1] + self.radius * math.sin(phi),
        )

    def tangent_at(self, s):
        phi = self.angle_from + s / self.radius
        return (-math.sin(phi), math.cos(phi))


@dataclass(frozen=True)
class RingPath:
    """Closed circular centerline (storage-ring guide)."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError("ring radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def length(self) -> float:
        return 2.0 * math.pi * self.radius

    def transverse_distance(self, x, y):
        px = np.asarray(x, dtype=float) - self.center[0]
        py = np.asarray(y, dtype=float) - self.center[1]
        return np.abs(np.hypot(px, py) - self.radius)

    def point_at(self, s):
        phi = s / self.radius
        return (
            self.center[0] + self.radius * math.cos(phi),
            self.center[1] + self.radius * math.sin(phi),
        )

    def tangent_at(self, s):
        phi = s / self.radius
        return (-math.sin(phi), math.cos(phi))


GuidePath = StraightPath | ArcPath | RingPath


# ---------------------------------------------------------------------------
# scalar fields


class ScalarField:
    """A queryable scalar map over 3D space (intensity or potential)."""

    units: str = INTENSITY_UNITS

    def values(self, x, y, z):
        raise NotImplementedError

    def __call__(self, x, y, z):
        return self.values(x, y, z)

    def value_at(self, point) -> float:
        return float(np.asarray(self.values(point[0], point[1], point[2])))

    @property
    def components(self) -> tuple["ScalarField", ...]:
        return (self,)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        if not isinstance(other, ScalarField):
            return NotImplemented
        if self.units != other.units:
            raise ConfigError(f"cannot add fields with units {self.units!r} and {other.units!r}")
        return SumField(self.components + other.components, units=self.units)

    def scaled(self, factor: float, units: str | None = None) -> "ScalarField":
        return ScaledField(self, factor, units or self.units)


class FuncField(ScalarField):
    """Field defined by a vectorized evaluator f(x, y, z)."""

    def __init__(self, evaluator, units: str = INTENSITY_UNITS, label: str = ""):
        self._evaluator = evaluator
        self.units = units
        self.label = label

    def values(self, x, y, z):
        return self._evaluator(np.asarray(x, dtype=float),
                               np.asarray(y, dtype=float),
                               np.asarray(z, dtype=float))


class SumField(ScalarField):
    """Pointwise sum of component fields (incoherent superposition)."""

    def __init__(self, parts, units: str):
        self._parts = tuple(parts)
        self.units = units

    @property
    def components(self):
        return self._parts

    def values(self, x, y, z):
        total = self._parts[0].values(x, y, z)
        for part in self._parts[1:]:
            total = total + part.values(x, y, z)
        return total


class ScaledField(ScalarField):
    """A field multiplied by a constant factor (e.g. intensity -> potential)."""

    def __init__(self, base: ScalarField, factor: float, units: str):
        self._base = base
        self.factor = float(factor)
        self.units = units

    def values(self, x, y, z):
        return self.factor * self._base.values(x, y, z)


# ---------------------------------------------------------------------------
# focus models


def rayleigh_range(waist: float, wavelength: float) -> float:
    """Axial length scale z_R = pi w0^2 / lambda of a Gaussian focus."""
    return math.pi * waist**2 / wavelength


def spherical_focus(beam: BeamSource, lens: LensletSpec, center=(0.0, 0.0, 0.0)) -> ScalarField:
    """Intensity of a single spherical-lenslet focus.

    Gaussian spot of waist w0 = focal size carrying the full beam power:
    I(r, z) = 2P/(pi w0^2) * (w0/w(z))^2 * exp(-2 r^2 / w(z)^2) with
    w(z)^2 = w0^2 (1 + (z/z_R)^2).
    """
    if lens.kind != "spherical":
        raise ConfigError("spherical_focus requires a spherical lenslet")
    w0 = lens.focal_size
    zR = rayleigh_range(w0, beam.lambdaL)
    peak = 2.0 * beam.power / (math.pi * w0**2)
    cx, cy, cz = center

    def evaluator(x, y, z):
        zeta = z - cz
        w2 = w0**2 * (1.0 + (zeta / zR) ** 2)
        r2 = (x - cx) ** 2 + (y - cy) ** 2
        return peak * (w0**2 / w2) * np.exp(-2.0 * r2 / w2)

    return FuncField(evaluator, INTENSITY_UNITS, label="spherical_focus")


def line_focus(beam: BeamSource, lens: LensletSpec, path: GuidePath, z0: float = 0.0) -> ScalarField:
    """Intensity of a cylindrical-lenslet line focus along ``path``.

    Transverse Gaussian of waist w0 = focal size, uniform along the
    centerline of length L; the focusing acts in one dimension only, so
    the on-axis intensity falls off as w0/w(z) away from the focal
    plane. The peak I0 = P sqrt(2/pi) / (w0 L) makes the transverse
    integral times L equal the beam power.
    """
    if lens.kind != "cylindrical":
        raise ConfigError("line_focus requires a cylindrical lenslet")
    w0 = lens.focal_size
    zR = rayleigh_range(w0, beam.lambdaL)
    peak = beam.power * math.sqrt(2.0 / math.pi) / (w0 * path.length)

    def evaluator(x, y, z):
        zeta = z - z0
        stretch = np.sqrt(1.0 + (zeta / zR) ** 2)
        w = w0 * stretch
        xi = path.transverse_distance(x, y)
        return (peak / stretch) * np.exp(-2.0 * xi**2 / w**2)

    return FuncField(evaluator, INTENSITY_UNITS, label="line_focus")


def array_field(beam: BeamSource, lens: LensletSpec, array: ArraySpec,
                center=(0.0, 0.0, 0.0)) -> ScalarField:
    """Incoherent sum of one focus per lattice site.

    ``beam.power`` is interpreted per lenslet, so each site carries the
    full power.
    """
    if array.pitch < lens.aperture:
        raise ConfigError("array pitch must be at least the lenslet aperture")
    sites = array.sites(center[:2])
    parts = [spherical_focus(beam, lens, (sx, sy, center[2])) for sx, sy in sites]
    if len(parts) == 1:
        return parts[0]
    return SumField(parts, INTENSITY_UNITS)


def dual_beam_shift(lens: LensletSpec, angle_a: float, angle_b: float) -> float:
    """Lateral focus displacement f*tan(db - da) between two tilted beams."""
    return lens.focal_length * math.tan(angle_b - angle_a)


def dual_beam_array(beam_a: BeamSource, beam_b: BeamSource, lens: LensletSpec,
                    array: ArraySpec, center=(0.0, 0.0, 0.0)) -> ScalarField:
    """Two interleaved trap arrays from two beams at different tilt angles.

    The second lattice is shifted by f*tan(angle_b - angle_a) along x;
    intensities add (orthogonal polarizations assumed).
    """
    shift = dual_beam_shift(lens, beam_a.angle, beam_b.angle)
    if abs(shift) > array.pitch / 2.0:
        warnings.warn(
            f"dual-beam shift {shift:.3g} m exceeds half the array pitch: "
            "displaced foci overlap the neighboring site",
            GeometryWarning,
            stacklevel=2,
        )
    field_a = array_field(beam_a, lens, array, center)
    field_b = array_field(beam_b, lens, array,
                          (center[0] + shift, center[1], center[2]))
    return field_a + field_b


def closest_approach(path_a: GuidePath, path_b: GuidePath, samples: int = 2001) -> float:
    """Minimum centerline-to-centerline distance between two guides."""
    s = np.linspace(0.0, path_a.length, samples)
    pts = np.array([path_a.point_at(si) for si in s])
    d = path_b.transverse_distance(pts[:, 0], pts[:, 1])
    return float(np.min(d))


def splitter_field(guide_a: GuidePath, guide_b: GuidePath,
                   beam_a: BeamSource, beam_b: BeamSource,
                   lens: LensletSpec, z0: float = 0.0) -> ScalarField:
    """Combined light field of two guides forming an X-shaped coupler.

    Incoherent sum of the two line foci. Warns when the guides never
    approach within ten waists (no coupling region).
    """
    gap = closest_approach(guide_a, guide_b)
    if gap > 10.0 * lens.focal_size:
        warnings.warn(
            f"no coupling region: guides stay {gap:.3g} m apart "
            f"(> 10 focal sizes)",
            GeometryWarning,
            stacklevel=2,
        )
    return line_focus(beam_a, lens, guide_a, z0) + line_focus(beam_b, lens, guide_b, z0)


# ---------------------------------------------------------------------------
# grid sampling


@dataclass(frozen=True)
class GridSpec:
    """Uniform sampling request: per-axis (lo, hi) extents and spacing."""

    extents: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    spacing: float | tuple[float, float, float]

    def __post_init__(self):
        # canonical form: always a per-axis spacing triple
        if isinstance(self.spacing, (int, float)):
            object.__setattr__(self, "spacing", (float(self.spacing),) * 3)
        else:
            object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "extents",
                           tuple((float(lo), float(hi)) for lo, hi in self.extents))

    def axes(self) -> tuple[np.ndarray, ...]:
        spacings = self.spacing_tuple()
        axes = []
        for (lo, hi), d in zip(self.extents, spacings):
            if hi < lo:
                raise ConfigError("grid extent must have hi >= lo")
            if hi == lo:
                axes.append(np.array([lo]))
                continue
            if d <= 0:
                raise ConfigError("grid spacing must be positive")
            n = int(math.ceil((hi - lo) / d - 1e-12)) + 1
            axes.append(lo + d * np.arange(n))
        return tuple(axes)

    def spacing_tuple(self) -> tuple[float, float, float]:
        return self.spacing


@dataclass(frozen=True)
class SampledField:
    """Dense field samples with grid metadata."""

    values: np.ndarray          # shape (nx, ny, nz)
    axes: tuple[np.ndarray, np.ndarray, np.ndarray]
    spacing: tuple[float, float, float]
    units: str
    extents: tuple[tuple[float, float], ...] = field(default=None)

    def __post_init__(self):
        if self.extents is None:
            object.__setattr__(
                self, "extents",
                tuple((float(ax[0]), float(ax[-1])) for ax in self.axes),
            )


def node_budget(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get(NODE_BUDGET_ENV)
    if env:
        try:
            return int(float(env))
        except ValueError:
            raise ConfigError(f"{NODE_BUDGET_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_NODE_BUDGET


def sample(field_: ScalarField, grid: GridSpec, budget: int | None = None) -> SampledField:
    """Evaluate ``field_`` on the grid, chunked over the z axis."""
    axes = grid.axes()
    n_nodes = int(np.prod([len(ax) for ax in axes]))
    limit = node_budget(budget)
    if n_nodes > limit:
        raise NodeBudgetError(
            f"grid of {n_nodes} nodes exceeds the node budget of {limit}; "
            f"coarsen the spacing, shrink the extents, or raise {NODE_BUDGET_ENV}"
        )
    ax, ay, az = axes
    out = np.empty((len(ax), len(ay), len(az)), dtype=float)
    X, Y = np.meshgrid(ax, ay, indexing="ij")
    chunk = max(1, int(4e6 // max(1, X.size)))
    for start in range(0, len(az), chunk):
        zs = az[start:start + chunk]
        out[:, :, start:start + len(zs)] = field_.values(
            X[:, :, None], Y[:, :, None], zs[None, None, :]
        )
    return SampledField(
        values=out,
        axes=(ax, ay, az),
        spacing=grid.spacing_tuple(),
        units=field_.units,
    )
