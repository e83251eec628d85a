"""Trap and waveguide characterization from intensity fields.

Converts an intensity field into a dipole potential, locates a trap
minimum, and extracts depth, harmonic frequencies (numerical Hessian),
ground-state sizes, recoil and Lamb-Dicke figures and the photon
scattering rate. ``table_report`` runs the whole chain for a list of
laser/power/focal-size configurations.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .catalog import AtomSpecies, BeamSource
from .constants import CONST
from .errors import (
    ConfigError,
    ConvergenceError,
    FlatPotentialError,
    NotATrapError,
)
from .fields import (
    INTENSITY_UNITS,
    POTENTIAL_UNITS,
    LensletSpec,
    ScalarField,
    StraightPath,
    line_focus,
    spherical_focus,
)
from .light_atom import dipole_potential, scattering_rate

LAMB_DICKE_THRESHOLD = 0.1
GRADIENT_TOLERANCE = 1e-8

# lenslet geometry used for table rows; only the focal size enters the
# Gaussian focus model, these fix the remaining (inert) spec fields
_DEFAULT_FOCAL_LENGTH = 625e-6
_DEFAULT_APERTURE = 125e-6


def potential_field(intensity: ScalarField, atom: AtomSpecies, wavelength: float) -> ScalarField:
    """Pointwise dipole potential of an intensity field (units J).

    The response is linear in intensity, so the potential field is the
    intensity field scaled by the potential per unit intensity; the
    analytic evaluator is preserved.
    """
    if intensity.units != INTENSITY_UNITS:
        raise ConfigError(f"potential_field expects intensity input, got units {intensity.units!r}")
    per_intensity = dipole_potential(atom, wavelength, 1.0)
    return intensity.scaled(per_intensity, POTENTIAL_UNITS)


# ---------------------------------------------------------------------------
# numerical minimization and curvature


def _gradient(f, p: np.ndarray, h: float) -> np.ndarray:
    g = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        g[i] = (f(p + e) - f(p - e)) / (2.0 * h)
    return g


def _hessian(f, p: np.ndarray, h: float) -> np.ndarray:
    H = np.empty((3, 3))
    f0 = f(p)
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = h
        H[i, i] = (f(p + ei) - 2.0 * f0 + f(p - ei)) / h**2
        for j in range(i + 1, 3):
            ej = np.zeros(3)
            ej[j] = h
            H[i, j] = H[j, i] = (
                f(p + ei + ej) - f(p + ei - ej) - f(p - ei + ej) + f(p - ei - ej)
            ) / (4.0 * h**2)
    return H


def _richardson_hessian(f, p: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Hessian extrapolated from steps h and h/2."""
    return (4.0 * _hessian(f, p, h / 2.0) - _hessian(f, p, h)) / 3.0


def find_minimum(potential: ScalarField, seed, scale: float) -> tuple[float, float, float]:
    """Locate a local potential minimum near ``seed``.

    Derivative-free descent (Nelder-Mead) followed by Newton polishing;
    converged when |grad U| * scale / |U| drops below 1e-8. ``scale`` is
    the characteristic trap size (the focal size for microlens traps).
    """
    f = potential.value_at
    p0 = np.asarray(seed, dtype=float)
    if p0.shape != (3,):
        raise ConfigError("seed must be a 3-component point")

    # flat-region guard: probe a small star around the seed
    probes = [f(p0)] + [
        f(p0 + scale * e)
        for e in (np.array([1, 0, 0.]), np.array([-1, 0, 0.]),
                  np.array([0, 1, 0.]), np.array([0, -1, 0.]),
                  np.array([0, 0, 1.]), np.array([0, 0, -1.]))
    ]
    vmax = max(abs(v) for v in probes)
    if vmax == 0.0 or (max(probes) - min(probes)) <= 1e-13 * vmax:
        raise FlatPotentialError("potential is flat around the seed point")

    res = optimize.minimize(
        lambda q: f(q), p0, method="Nelder-Mead",
        options=dict(xatol=1e-5 * scale, fatol=1e-12 * vmax, maxiter=4000),
    )
    p = np.asarray(res.x, dtype=float)

    h = scale / 100.0
    for _ in range(40):
        value = f(p)
        if value == 0.0:
            raise ConvergenceError("descent left the support of the potential")
        g = _gradient(f, p, h)
        if np.linalg.norm(g) * scale / abs(value) < GRADIENT_TOLERANCE:
            return tuple(float(v) for v in p)
        H = _hessian(f, p, h)
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            step = -g * scale / max(np.linalg.norm(g), 1e-300)
        norm = np.linalg.norm(step)
        if norm > scale:
            step *= scale / norm
        trial = p + step
        if f(trial) <= value:
            p = trial
        else:
            # halve until improvement; abandon when steps become negligible
            shrink = 0.5
            while shrink > 1e-8 and f(p + shrink * step) > value:
                shrink *= 0.5
            if shrink <= 1e-8:
                break
            p = p + shrink * step
    g = _gradient(f, p, h)
    if np.linalg.norm(g) * scale / max(abs(f(p)), 1e-300) < GRADIENT_TOLERANCE:
        return tuple(float(v) for v in p)
    raise ConvergenceError("minimum refinement did not reach the gradient tolerance")


def trap_depth(potential: ScalarField, minimum, reference: float = 0.0) -> float:
    """Depth U(reference level) - U(minimum); fields here vanish at infinity."""
    return reference - potential.value_at(minimum)


def harmonic_frequencies(potential: ScalarField, minimum, atom: AtomSpecies,
                         scale: float, light_axis=(0.0, 0.0, 1.0)) -> tuple[float, float]:
    """Harmonic frequencies (omega_r, omega_z) about a minimum.

    omega_i = sqrt(curvature_i / m) from the Richardson-extrapolated
    central-difference Hessian (steps scale/100 and scale/200). The
    axial frequency is the principal direction best aligned with the
    light axis; directions with vanishing curvature (a guide's free
    axis) are dropped from the transverse average.
    """
    p = np.asarray(minimum, dtype=float)
    H = _richardson_hessian(potential.value_at, p, scale / 100.0)
    eigvals, eigvecs = np.linalg.eigh(H)
    tol = 1e-6 * float(np.max(np.abs(eigvals)))
    if np.any(eigvals < -tol):
        raise NotATrapError("not a trap: the stationary point has negative curvature")
    axis = np.asarray(light_axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    alignment = np.abs(eigvecs.T @ axis)
    k_axial = int(np.argmax(alignment))
    lam_axial = eigvals[k_axial]
    if lam_axial <= tol:
        raise NotATrapError("not a trap: no confinement along the light axis")
    transverse = [lam for k, lam in enumerate(eigvals) if k != k_axial and lam > tol]
    if not transverse:
        raise NotATrapError("not a trap: no transverse confinement")
    lam_r = float(np.mean(transverse))
    return math.sqrt(lam_r / atom.mass), math.sqrt(lam_axial / atom.mass)


# ---------------------------------------------------------------------------
# derived single-number figures


def ground_state_size(omega: float, atom: AtomSpecies) -> float:
    """Harmonic-oscillator ground-state extent sqrt(hbar / (m omega))."""
    if omega <= 0:
        raise ConfigError("ground_state_size requires omega > 0")
    return math.sqrt(CONST.hbar / (atom.mass * omega))


def recoil_frequency(atom: AtomSpecies) -> float:
    """Single-photon recoil frequency hbar k0^2 / (2 m) [rad/s]."""
    return CONST.hbar * atom.wavenumber0**2 / (2.0 * atom.mass)


def doppler_energy(atom: AtomSpecies) -> float:
    """Doppler-cooling kinetic energy scale hbar Gamma / 2 [J]."""
    return CONST.hbar * atom.gamma / 2.0


@dataclass(frozen=True)
class LambDicke:
    ok: bool
    ratio_r: float
    ratio_z: float


def lamb_dicke_check(x_r: float, x_z: float, atom: AtomSpecies) -> LambDicke:
    """Both ground-state sizes well below the resonance wavelength?

    "Well below" is fixed at a ratio of 0.1.
    """
    if x_r <= 0 or x_z <= 0:
        raise ConfigError("ground-state sizes must be positive")
    r_r = x_r / atom.lambda0
    r_z = x_z / atom.lambda0
    return LambDicke(ok=(r_r < LAMB_DICKE_THRESHOLD and r_z < LAMB_DICKE_THRESHOLD),
                     ratio_r=r_r, ratio_z=r_z)


# ---------------------------------------------------------------------------
# full characterization


@dataclass(frozen=True)
class TrapCharacterization:
    """All single-trap figures of merit, SI units throughout."""

    minimum: tuple[float, float, float]
    depth: float                 # [J]
    omega_r: float               # transverse harmonic frequency [rad/s]
    omega_z: float               # axial (along light) frequency [rad/s]
    x_r: float                   # [m]
    x_z: float                   # [m]
    scattering_rate_min: float   # [1/s] at the trap minimum
    recoil: float                # [rad/s]
    single_mode_ratio: float     # omega_r / recoil
    lamb_dicke: LambDicke
    above_doppler: bool          # depth exceeds the Doppler energy

    @property
    def depth_kelvin(self) -> float:
        return self.depth / CONST.kB

    def as_dict(self) -> dict:
        return {
            "minimum_m": list(self.minimum),
            "depth_J": self.depth,
            "depth_K": self.depth_kelvin,
            "omega_r": self.omega_r,
            "omega_z": self.omega_z,
            "x_r_m": self.x_r,
            "x_z_m": self.x_z,
            "scattering_rate": self.scattering_rate_min,
            "recoil_frequency": self.recoil,
            "single_mode_ratio": self.single_mode_ratio,
            "lamb_dicke_ok": self.lamb_dicke.ok,
            "lamb_dicke_ratio_r": self.lamb_dicke.ratio_r,
            "lamb_dicke_ratio_z": self.lamb_dicke.ratio_z,
            "above_doppler": self.above_doppler,
        }


def characterize_trap(intensity: ScalarField, atom: AtomSpecies, wavelength: float,
                      seed, scale: float) -> TrapCharacterization:
    """Characterize the trap of ``intensity`` nearest to ``seed``."""
    U = potential_field(intensity, atom, wavelength)
    if U.value_at(seed) >= 0.0:
        raise NotATrapError(
            "not a trap: the potential is non-negative at the seed "
            "(blue detuning gives a maximum, not a minimum)"
        )
    minimum = find_minimum(U, seed, scale)
    depth = trap_depth(U, minimum)
    omega_r, omega_z = harmonic_frequencies(U, minimum, atom, scale)
    x_r = ground_state_size(omega_r, atom)
    x_z = ground_state_size(omega_z, atom)
    rate = scattering_rate(atom, wavelength, intensity.value_at(minimum))
    w_rec = recoil_frequency(atom)
    return TrapCharacterization(
        minimum=minimum,
        depth=depth,
        omega_r=omega_r,
        omega_z=omega_z,
        x_r=x_r,
        x_z=x_z,
        scattering_rate_min=rate,
        recoil=w_rec,
        single_mode_ratio=omega_r / w_rec,
        lamb_dicke=lamb_dicke_check(x_r, x_z, atom),
        above_doppler=depth > doppler_energy(atom),
    )


# ---------------------------------------------------------------------------
# table reports


@dataclass(frozen=True)
class TrapRowSpec:
    """One report row: laser wavelength, power and focal size.

    ``geometry`` is "spot" (spherical lenslet focus) or "guide"
    (cylindrical line focus of length ``length``). ``reference`` may
    hold published values (same keys as the report columns) to compare
    against.
    """

    label: str
    wavelength: float
    power: float
    focal_size: float
    geometry: str = "spot"
    length: float | None = None
    reference: dict | None = None

    def __post_init__(self):
        if self.geometry not in ("spot", "guide"):
            raise ConfigError(f"row geometry must be spot or guide, got {self.geometry!r}")
        if self.geometry == "guide" and (self.length is None or self.length <= 0):
            raise ConfigError("guide rows need a positive length")


def _row_field(row: TrapRowSpec):
    beam = BeamSource(lambdaL=row.wavelength, power=row.power)
    if row.geometry == "spot":
        lens = LensletSpec("spherical", _DEFAULT_FOCAL_LENGTH,
                           _DEFAULT_APERTURE, row.focal_size)
        return spherical_focus(beam, lens, (0.0, 0.0, 0.0))
    lens = LensletSpec("cylindrical", _DEFAULT_FOCAL_LENGTH,
                       _DEFAULT_APERTURE, row.focal_size)
    path = StraightPath(start=(0.0, -row.length / 2.0), direction=(0.0, 1.0),
                        length=row.length)
    return line_focus(beam, lens, path)


_REFERENCE_KEYS = ("depth", "omega_r", "omega_z", "x_r", "x_z", "scattering_rate")


def characterize_row(atom: AtomSpecies, row: TrapRowSpec) -> dict:
    intensity = _row_field(row)
    char = characterize_trap(intensity, atom, row.wavelength,
                             seed=(0.0, 0.0, 0.0), scale=row.focal_size)
    entry = {
        "label": row.label,
        "geometry": row.geometry,
        "wavelength_m": row.wavelength,
        "power_W": row.power,
        "focal_size_m": row.focal_size,
        "length_m": row.length,
    }
    entry.update(char.as_dict())
    if row.reference:
        model = {
            "depth": char.depth,
            "omega_r": char.omega_r,
            "omega_z": char.omega_z,
            "x_r": char.x_r,
            "x_z": char.x_z,
            "scattering_rate": char.scattering_rate_min,
        }
        for key in _REFERENCE_KEYS:
            if key in row.reference:
                ref = row.reference[key]
                entry[f"ref_{key}"] = ref
                entry[f"delta_{key}_pct"] = 100.0 * (model[key] / ref - 1.0)
    return entry


def table_report(atom: AtomSpecies, rows: list[TrapRowSpec], jobs: int = 1) -> list[dict]:
    """Characterize every row; rows are independent and may run in parallel."""
    if not rows:
        return []
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda r: characterize_row(atom, r), rows))
    return [characterize_row(atom, row) for row in rows]
