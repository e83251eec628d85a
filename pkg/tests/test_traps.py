import math

import numpy as np
import pytest
from scipy import constants as sc

from mtd import (
    ArraySpec,
    BeamSource,
    ConfigError,
    FlatPotentialError,
    LensletSpec,
    NotATrapError,
    StraightPath,
    TrapRowSpec,
    characterize_row,
    characterize_trap,
    doppler_energy,
    dipole_potential,
    dual_beam_array,
    find_minimum,
    ground_state_size,
    harmonic_frequencies,
    lamb_dicke_check,
    line_focus,
    potential_field,
    recoil_frequency,
    spherical_focus,
    table_report,
    trap_depth,
)
from mtd.catalog import AtomSpecies
from mtd.fields import FuncField, POTENTIAL_UNITS

LENS = LensletSpec("spherical", 625e-6, 125e-6, 1e-6)
CYL = LensletSpec("cylindrical", 2.21e-3, 400e-6, 1e-6)


def row1_intensity():
    return spherical_focus(BeamSource(lambdaL=783e-9, power=1e-3), LENS)


# ---------------------------------------------------------------------------
# potential conversion


def test_zero_intensity_zero_potential(rb85):
    zero = FuncField(lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape))
    u = potential_field(zero, rb85, 783e-9)
    assert u.value_at((1e-6, 0, 0)) == 0.0
    assert u.units == POTENTIAL_UNITS


def test_potential_equals_pointwise_conversion(rb85):
    intensity = row1_intensity()
    u = potential_field(intensity, rb85, 783e-9)
    rng = np.random.default_rng(0)
    for p in rng.uniform(-2e-6, 2e-6, (20, 3)):
        expected = dipole_potential(rb85, 783e-9, intensity.value_at(p))
        assert u.value_at(p) == pytest.approx(expected, rel=0, abs=0)


def test_units_guard(rb85):
    u = potential_field(row1_intensity(), rb85, 783e-9)
    with pytest.raises(ConfigError, match="intensity"):
        potential_field(u, rb85, 783e-9)


# ---------------------------------------------------------------------------
# minimum search


def test_find_minimum_from_offset_seeds(rb85):
    u = potential_field(row1_intensity(), rb85, 783e-9)
    rng = np.random.default_rng(1)
    for _ in range(5):
        seed = rng.uniform(-1e-6, 1e-6, 3)
        p = find_minimum(u, seed, scale=1e-6)
        assert np.linalg.norm(p) < 1e-4 * 1e-6


def test_find_minimum_dual_wells(rb85):
    # two displaced foci three waists apart: one minimum near each focus
    shift_angle = math.atan(3e-6 / 625e-6)
    field = dual_beam_array(
        BeamSource(lambdaL=783e-9, power=1e-3, angle=0.0),
        BeamSource(lambdaL=783e-9, power=1e-3, angle=shift_angle, polarization="lin-y"),
        LENS, ArraySpec("rectangular", 125e-6, (1, 1)))
    u = potential_field(field, rb85, 783e-9)
    p_left = find_minimum(u, (-0.2e-6, 0.1e-6, 0), scale=1e-6)
    p_right = find_minimum(u, (3.2e-6, -0.1e-6, 0), scale=1e-6)
    assert abs(p_left[0] - 0.0) < 5e-8
    assert abs(p_right[0] - 3e-6) < 5e-8


def test_uniform_field_flat_error(rb85):
    const = FuncField(lambda x, y, z: np.full(np.broadcast(x, y, z).shape, 5.0),
                      units=POTENTIAL_UNITS)
    with pytest.raises(FlatPotentialError):
        find_minimum(const, (0, 0, 0), scale=1e-6)


def test_argmin_invariant_under_intensity_scaling(rb85):
    u1 = potential_field(row1_intensity(), rb85, 783e-9)
    u9 = potential_field(
        spherical_focus(BeamSource(lambdaL=783e-9, power=9e-3), LENS), rb85, 783e-9)
    p1 = find_minimum(u1, (0.5e-6, -0.3e-6, 0.4e-6), scale=1e-6)
    p9 = find_minimum(u9, (0.5e-6, -0.3e-6, 0.4e-6), scale=1e-6)
    assert np.linalg.norm(np.subtract(p1, p9)) < 1e-4 * 1e-6
    assert trap_depth(u9, p9) == pytest.approx(9 * trap_depth(u1, p1), rel=1e-9)


# ---------------------------------------------------------------------------
# depth


def test_depth_row1_against_published(rb85):
    u = potential_field(row1_intensity(), rb85, 783e-9)
    depth = trap_depth(u, find_minimum(u, (0, 0, 0), scale=1e-6))
    assert depth / sc.k == pytest.approx(6.1e-3, rel=0.25)


def test_depth_waveguide_row1_against_published(rb85):
    path = StraightPath((0, -5e-3), (0, 1), 10e-3)
    f = line_focus(BeamSource(lambdaL=783e-9, power=0.1), CYL, path)
    u = potential_field(f, rb85, 783e-9)
    depth = trap_depth(u, find_minimum(u, (0, 0, 0), scale=1e-6))
    assert depth / sc.k == pytest.approx(59e-6, rel=0.35)


def test_depth_gauge_invariance(rb85):
    u = potential_field(row1_intensity(), rb85, 783e-9)
    minimum = find_minimum(u, (0, 0, 0), scale=1e-6)
    offset = 3.3e-27
    shifted = u + FuncField(lambda x, y, z: np.full(np.broadcast(x, y, z).shape, offset),
                            units=POTENTIAL_UNITS)
    assert trap_depth(shifted, minimum, reference=offset) == pytest.approx(
        trap_depth(u, minimum), rel=1e-12)


# ---------------------------------------------------------------------------
# harmonic frequencies


def quadratic_well(mass, omega_r, omega_z):
    def f(x, y, z):
        return 0.5 * mass * (omega_r**2 * (x**2 + y**2) + omega_z**2 * z**2)
    return FuncField(f, units=POTENTIAL_UNITS)


def test_quadratic_well_exact(rb85):
    u = quadratic_well(rb85.mass, 1e5, 1e5)
    wr, wz = harmonic_frequencies(u, (0, 0, 0), rb85, scale=1e-6)
    assert wr == pytest.approx(1e5, rel=1e-6)
    assert wz == pytest.approx(1e5, rel=1e-6)


def test_quartic_term_removed_by_extrapolation(rb85):
    # Richardson extrapolation cancels the quartic contamination of the
    # central second difference exactly
    beta = 1e-10
    def f(x, y, z):
        r2 = x**2 + y**2
        return 0.5 * rb85.mass * (1e5**2 * (r2 + z**2)) + beta * (x**4 + y**4 + z**4)
    u = FuncField(f, units=POTENTIAL_UNITS)
    wr, wz = harmonic_frequencies(u, (0, 0, 0), rb85, scale=1e-6)
    assert wr == pytest.approx(1e5, rel=1e-4)
    assert wz == pytest.approx(1e5, rel=1e-4)


def test_gaussian_well_matches_closed_form(rb85):
    u = potential_field(row1_intensity(), rb85, 783e-9)
    depth = trap_depth(u, (0.0, 0.0, 0.0))
    wr, wz = harmonic_frequencies(u, (0.0, 0.0, 0.0), rb85, scale=1e-6)
    waist = 1e-6
    zr = math.pi * waist**2 / 783e-9
    assert wr == pytest.approx(math.sqrt(4 * depth / (rb85.mass * waist**2)), rel=1e-4)
    assert wz == pytest.approx(math.sqrt(2 * depth / (rb85.mass * zr**2)), rel=1e-4)


def test_row1_frequencies_against_published(rb85):
    u = potential_field(row1_intensity(), rb85, 783e-9)
    wr, wz = harmonic_frequencies(u, (0.0, 0.0, 0.0), rb85, scale=1e-6)
    assert wr == pytest.approx(1.5e6, rel=0.20)
    assert wz == pytest.approx(2.0e5, rel=0.40)


def test_maximum_is_not_a_trap(rb85):
    u = quadratic_well(rb85.mass, 1e5, 1e5).scaled(-1.0, POTENTIAL_UNITS)
    with pytest.raises(NotATrapError):
        harmonic_frequencies(u, (0, 0, 0), rb85, scale=1e-6)


def test_red_blue_duality(rb85):
    intensity = row1_intensity()
    u_red = potential_field(intensity, rb85, 783e-9)
    u_blue = potential_field(intensity, rb85, 777e-9)
    assert u_red.value_at((0, 0, 0)) < 0 < u_blue.value_at((0, 0, 0))
    # the red minimum is the blue maximum at the same location
    rng = np.random.default_rng(2)
    pts = rng.uniform(-2e-6, 2e-6, (50, 3))
    vals = u_blue.values(pts[:, 0], pts[:, 1], pts[:, 2])
    assert np.all(vals <= u_blue.value_at((0, 0, 0)))
    with pytest.raises(NotATrapError):
        harmonic_frequencies(u_blue, (0, 0, 0), rb85, scale=1e-6)


# ---------------------------------------------------------------------------
# derived figures


def test_ground_state_size_against_published(rb85):
    assert ground_state_size(1.5e6, rb85) == pytest.approx(22e-9, rel=0.05)
    assert ground_state_size(2.0e5, rb85) == pytest.approx(61e-9, rel=0.05)


def test_ground_state_size_scaling(rb85):
    x = ground_state_size(1e5, rb85)
    assert ground_state_size(4e5, rb85) == pytest.approx(x / 2, rel=1e-12)


def test_recoil_frequency_published(rb85):
    assert recoil_frequency(rb85) == pytest.approx(2.4e4, rel=0.02)


def test_recoil_mass_scaling(rb85):
    heavy = AtomSpecies("heavy", 2 * rb85.mass, rb85.lambda0, rb85.gamma)
    assert recoil_frequency(heavy) == pytest.approx(recoil_frequency(rb85) / 2, rel=1e-12)


def test_recoil_cs133_golden(golden_values):
    from mtd import preset_species
    cs = preset_species("Cs-133")
    assert recoil_frequency(cs) == pytest.approx(
        golden_values["recoil_cs133"]["omega_recoil"], rel=1e-12)


def test_doppler_energy_value(rb85):
    assert doppler_energy(rb85) / sc.k == pytest.approx(0.141e-3, abs=0.5e-6)


def test_lamb_dicke_published_row(rb85):
    res = lamb_dicke_check(22e-9, 61e-9, rb85)
    assert res.ok
    assert res.ratio_r == pytest.approx(22 / 780, rel=1e-9)


def test_lamb_dicke_boundary(rb85):
    assert not lamb_dicke_check(rb85.lambda0, 50e-9, rb85).ok
    assert lamb_dicke_check(77.9e-9, 77.9e-9, rb85).ok
    assert not lamb_dicke_check(78.1e-9, 77.9e-9, rb85).ok


# ---------------------------------------------------------------------------
# full characterization


def test_characterize_row1(rb85):
    char = characterize_trap(row1_intensity(), rb85, 783e-9, seed=(0, 0, 0), scale=1e-6)
    assert char.depth / sc.k == pytest.approx(6.1e-3, rel=0.25)
    assert char.omega_r == pytest.approx(1.5e6, rel=0.20)
    assert char.omega_z == pytest.approx(2.0e5, rel=0.40)
    assert char.x_r == pytest.approx(22e-9, rel=0.20)
    assert char.x_z == pytest.approx(61e-9, rel=0.20)
    assert char.scattering_rate_min == pytest.approx(3800.0, rel=0.35)
    assert char.lamb_dicke.ok
    assert char.above_doppler
    assert char.single_mode_ratio == pytest.approx(char.omega_r / char.recoil, rel=1e-12)
    # stored sizes stay exactly consistent with the stored frequencies
    assert char.x_r == pytest.approx(math.sqrt(sc.hbar / (rb85.mass * char.omega_r)), rel=1e-12)


def test_characterize_waveguide_ndyag(rb85):
    row = TrapRowSpec("nd-yag", 1064e-9, 10.0, 1e-6, geometry="guide", length=0.01)
    entry = characterize_row(rb85, row)
    assert entry["depth_K"] == pytest.approx(170e-6, rel=0.35)
    assert entry["scattering_rate"] == pytest.approx(0.6, rel=0.35)


def test_characterize_blue_is_not_a_trap(rb85):
    blue = spherical_focus(BeamSource(lambdaL=770e-9, power=1e-3), LENS)
    with pytest.raises(NotATrapError):
        characterize_trap(blue, rb85, 770e-9, seed=(0, 0, 0), scale=1e-6)


def test_empty_table_report(rb85):
    assert table_report(rb85, []) == []


def test_table_report_parallel_matches_serial(rb85):
    rows = [
        TrapRowSpec("diode", 783e-9, 1e-3, 1e-6),
        TrapRowSpec("nd-yag", 1064e-9, 0.1, 1e-6),
        TrapRowSpec("diode-wg", 783e-9, 0.1, 1e-6, geometry="guide", length=0.01),
    ]
    serial = table_report(rb85, rows)
    parallel = table_report(rb85, rows, jobs=3)
    assert [r["label"] for r in parallel] == [r["label"] for r in serial]
    for a, b in zip(serial, parallel):
        assert a["depth_J"] == b["depth_J"]


def test_table_report_reference_deltas(rb85):
    rows = [TrapRowSpec("diode", 783e-9, 1e-3, 1e-6,
                        reference={"depth": 6.1e-3 * sc.k, "omega_r": 1.5e6})]
    entry = table_report(rb85, rows)[0]
    assert entry["ref_omega_r"] == 1.5e6
    assert entry["delta_depth_pct"] == pytest.approx(-8.9, abs=0.5)


PRINTED_OMEGA_X_PAIRS = [
    # (omega_r, omega_z, x_r_nm, x_z_nm) as published for traps ...
    (1.5e6, 2.0e5, 22, 61),
    (4.7e6, 6.4e5, 13, 34),
    (1.7e6, 2.3e5, 21, 57),
    (2.5e6, 3.5e5, 17, 47),
    (5.4e4, 1.0e4, 120, 270),
    # ... and for waveguides
    (1.5e5, 2.0e4, 72, 190),
    (4.6e5, 6.3e4, 40, 110),
    (1.6e5, 2.3e4, 67, 180),
    (2.5e5, 3.6e4, 53, 140),
    (1.7e4, 3.1e3, 210, 490),
]


@pytest.mark.parametrize("omega_r,omega_z,x_r,x_z", PRINTED_OMEGA_X_PAIRS)
def test_published_frequency_size_consistency(rb85, omega_r, omega_z, x_r, x_z):
    # feeding the published (2-significant-figure) frequencies into the
    # ground-state-size convention reproduces the published sizes at the
    # two-figure level (the frequencies are themselves rounded, so allow 5%)
    assert ground_state_size(omega_r, rb85) == pytest.approx(x_r * 1e-9, rel=0.05)
    assert ground_state_size(omega_z, rb85) == pytest.approx(x_z * 1e-9, rel=0.05)
