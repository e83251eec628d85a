import math

import numpy as np
import pytest
from scipy import integrate

from mtd import (
    ArcPath,
    ArraySpec,
    BeamSource,
    ConfigError,
    GeometryWarning,
    GridSpec,
    LensletSpec,
    NodeBudgetError,
    RingPath,
    StraightPath,
    array_field,
    dual_beam_array,
    dual_beam_shift,
    line_focus,
    sample,
    spherical_focus,
    splitter_field,
)
from mtd.fields import FuncField, rayleigh_range

LENS = LensletSpec("spherical", 625e-6, 125e-6, 1e-6)
CYL = LensletSpec("cylindrical", 2.21e-3, 400e-6, 1e-6)


def beam(power=1e-3, lam=783e-9, angle=0.0, pol="lin-x"):
    return BeamSource(lambdaL=lam, power=power, angle=angle, polarization=pol)


# ---------------------------------------------------------------------------
# specs


def test_numerical_aperture_range():
    assert 0 < LENS.numerical_aperture < 1
    fast = LensletSpec("spherical", 100e-6, 115e-6, 1e-6)
    assert fast.numerical_aperture == pytest.approx(0.5, abs=0.03)


@pytest.mark.parametrize("kwargs", [
    dict(kind="oval", focal_length=1e-3, aperture=1e-4, focal_size=1e-6),
    dict(kind="spherical", focal_length=-1e-3, aperture=1e-4, focal_size=1e-6),
    dict(kind="spherical", focal_length=1e-3, aperture=0.0, focal_size=1e-6),
])
def test_lenslet_validation(kwargs):
    with pytest.raises(ConfigError):
        LensletSpec(**kwargs)


def test_array_validation():
    with pytest.raises(ConfigError):
        ArraySpec("triclinic", 125e-6, (2, 2))
    with pytest.raises(ConfigError):
        ArraySpec("rectangular", 125e-6, (0, 2))
    with pytest.raises(ConfigError):
        array_field(beam(), LENS, ArraySpec("rectangular", 50e-6, (2, 2)))


# ---------------------------------------------------------------------------
# spherical focus


def test_peak_intensity_closed_form():
    f = spherical_focus(beam(power=1e-3), LENS)
    assert f.value_at((0, 0, 0)) == pytest.approx(2e-3 / (math.pi * 1e-12), rel=1e-12)
    assert f.value_at((0, 0, 0)) == pytest.approx(6.37e8, rel=1e-3)


def test_zero_power_zero_field():
    f = spherical_focus(beam(power=0.0), LENS)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-5e-6, 5e-6, (100, 3))
    assert np.all(f.values(pts[:, 0], pts[:, 1], pts[:, 2]) == 0.0)


def test_axial_halfway_at_rayleigh_range():
    f = spherical_focus(beam(), LENS)
    zr = rayleigh_range(1e-6, 783e-9)
    assert f.value_at((0, 0, zr)) == pytest.approx(f.value_at((0, 0, 0)) / 2, rel=1e-12)


def test_transverse_waist_definition():
    f = spherical_focus(beam(), LENS)
    # 1/e^2 radius: intensity at r = w0 is exp(-2) of the peak
    ratio = f.value_at((1e-6, 0, 0)) / f.value_at((0, 0, 0))
    assert ratio == pytest.approx(math.exp(-2), rel=1e-12)


# ---------------------------------------------------------------------------
# line focus


def test_line_focus_peak_closed_form():
    path = StraightPath((0, -5e-3), (0, 1), 10e-3)
    f = line_focus(BeamSource(lambdaL=783e-9, power=0.1), CYL, path)
    expected = 0.1 * math.sqrt(2 / math.pi) / (1e-6 * 10e-3)
    assert f.value_at((0, 0, 0)) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(7.98e6, rel=1e-3)


def test_line_focus_power_bookkeeping():
    # transverse integral at the focal plane times L recovers the power
    length = 10e-3
    power = 0.1
    path = StraightPath((0, -length / 2), (0, 1), length)
    f = line_focus(BeamSource(lambdaL=783e-9, power=power), CYL, path)
    xi = np.linspace(-8e-6, 8e-6, 4001)
    profile = f.values(xi, np.zeros_like(xi), np.zeros_like(xi))
    recovered = integrate.simpson(profile, x=xi) * length
    assert recovered == pytest.approx(power, rel=1e-3)


def test_line_focus_doubling_length_halves_peak():
    def peak(length):
        path = StraightPath((0, -length / 2), (0, 1), length)
        return line_focus(beam(power=0.1), CYL, path).value_at((0, 0, 0))
    assert peak(0.02) == pytest.approx(peak(0.01) / 2, rel=1e-12)


def test_ring_profile_matches_straight_profile():
    radius = 1e-3
    ring = RingPath((0, 0), radius)
    f_ring = line_focus(beam(power=0.1), CYL, ring)
    length = ring.length
    straight = StraightPath((0, -length / 2), (0, 1), length)
    f_str = line_focus(beam(power=0.1), CYL, straight)
    offsets = np.linspace(-3e-6, 3e-6, 41)
    for phi in (0.0, 1.1, 2.5):  # arbitrary arc positions
        p_ring = f_ring.values((radius + offsets) * math.cos(phi),
                               (radius + offsets) * math.sin(phi),
                               np.zeros_like(offsets))
        p_str = f_str.values(offsets, np.zeros_like(offsets), np.zeros_like(offsets))
        np.testing.assert_allclose(p_ring, p_str, rtol=1e-12)


def test_line_focus_axial_falloff_single_power():
    # 1D focusing: on-axis intensity drops as 1/sqrt(1+(z/zR)^2)
    path = StraightPath((0, -5e-3), (0, 1), 10e-3)
    f = line_focus(beam(power=0.1), CYL, path)
    zr = rayleigh_range(1e-6, 783e-9)
    ratio = f.value_at((0, 0, zr)) / f.value_at((0, 0, 0))
    assert ratio == pytest.approx(1 / math.sqrt(2), rel=1e-12)


# ---------------------------------------------------------------------------
# arrays


def test_single_site_array_equals_single_focus():
    single = spherical_focus(beam(), LENS)
    arr = array_field(beam(), LENS, ArraySpec("rectangular", 125e-6, (1, 1)))
    rng = np.random.default_rng(1)
    pts = rng.uniform(-3e-6, 3e-6, (50, 3))
    np.testing.assert_allclose(arr.values(*pts.T), single.values(*pts.T), rtol=1e-12)


def test_array_has_expected_maxima_grid():
    arr_spec = ArraySpec("rectangular", 125e-6, (10, 10))
    sites = arr_spec.sites()
    assert sites.shape == (100, 2)
    field = array_field(beam(), LENS, arr_spec)
    peak = 2e-3 / (math.pi * 1e-12)
    vals = field.values(sites[:, 0], sites[:, 1], np.zeros(len(sites)))
    np.testing.assert_allclose(vals, peak, rtol=1e-10)


def test_hexagonal_sites_spacing():
    arr_spec = ArraySpec("hexagonal", 125e-6, (4, 4))
    sites = arr_spec.sites()
    # nearest-neighbor distance equals the pitch within rows
    row0 = sites.reshape(4, 4, 2)[:, 0, :]
    assert np.hypot(*(row0[1] - row0[0])) == pytest.approx(125e-6)


def test_neighboring_traps_independent():
    # midway between neighbors the intensity is far below a millionth of
    # the peak: Gaussian tail at 62.5 waists
    field = array_field(beam(), LENS, ArraySpec("rectangular", 125e-6, (2, 1)))
    peak = field.value_at((-62.5e-6, 0, 0))
    mid = field.value_at((0.0, 0.0, 0.0))
    assert mid < 1e-6 * peak


# ---------------------------------------------------------------------------
# dual beam arrays


def test_equal_angles_give_doubled_power():
    arr_spec = ArraySpec("rectangular", 125e-6, (2, 2))
    one = array_field(beam(power=1e-3), LENS, arr_spec)
    two = dual_beam_array(beam(power=1e-3), beam(power=1e-3, pol="lin-y"), LENS, arr_spec)
    rng = np.random.default_rng(2)
    pts = rng.uniform(-200e-6, 200e-6, (50, 3))
    np.testing.assert_allclose(two.values(*pts.T), 2 * one.values(*pts.T), rtol=1e-12)


def test_shift_formula_one_degree():
    lens = LensletSpec("spherical", 625e-6, 125e-6, 1e-6)
    s = dual_beam_shift(lens, 0.0, math.radians(1.0))
    assert s == pytest.approx(10.9e-6, rel=0.01)


def test_large_shift_warns():
    arr_spec = ArraySpec("rectangular", 125e-6, (2, 2))
    with pytest.warns(GeometryWarning):
        dual_beam_array(beam(angle=0.0), beam(angle=math.radians(8.0), pol="lin-y"),
                        LENS, arr_spec)


def _count_intensity_maxima_on_axis(field, half_span, n=6001):
    x = np.linspace(-half_span, half_span, n)
    v = field.values(x, np.zeros_like(x), np.zeros_like(x))
    interior = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    return int(np.sum(interior))


@pytest.mark.parametrize("degrees,expected", [
    (0.5, 2), (0.2, 2), (0.12, 2), (0.05, 1), (0.02, 1), (0.0, 1),
])
def test_two_foci_merge_as_angle_closes(degrees, expected):
    # brute-force scan of the on-axis intensity of a single lenslet lit
    # by two beams; the two maxima merge when the shift drops below the
    # waist (shift = w0 at about 0.092 degrees for f = 625 um)
    arr_spec = ArraySpec("rectangular", 125e-6, (1, 1))
    field = dual_beam_array(beam(angle=0.0), beam(angle=math.radians(degrees), pol="lin-y"),
                            LENS, arr_spec)
    shift = dual_beam_shift(LENS, 0.0, math.radians(degrees))
    assert _count_intensity_maxima_on_axis(field, abs(shift) + 4e-6) == expected


# ---------------------------------------------------------------------------
# splitter fields


def _arc_pair(gap, radius=20e-6, half_angle=0.5):
    a = ArcPath((0, gap / 2 + radius), radius, -math.pi / 2 - half_angle,
                -math.pi / 2 + half_angle)
    b = ArcPath((0, -gap / 2 - radius), radius, math.pi / 2 - half_angle,
                math.pi / 2 + half_angle)
    return a, b


def test_splitter_midpoint_closed_form():
    # both guides one waist away from the midpoint: 2 I0 e^-2
    ga, gb = _arc_pair(2e-6)
    f = splitter_field(ga, gb, beam(power=0.1), beam(power=0.1, pol="lin-y"), CYL)
    single = line_focus(beam(power=0.1), CYL, ga)
    peak = single.value_at((0, 1e-6, 0))
    assert f.value_at((0, 0, 0)) == pytest.approx(2 * peak * math.exp(-2), rel=1e-9)


def test_splitter_mirror_symmetric():
    ga, gb = _arc_pair(2e-6)
    f = splitter_field(ga, gb, beam(power=0.1), beam(power=0.1, pol="lin-y"), CYL)
    rng = np.random.default_rng(3)
    pts = rng.uniform(-8e-6, 8e-6, (200, 3))
    up = f.values(pts[:, 0], pts[:, 1], pts[:, 2])
    down = f.values(pts[:, 0], -pts[:, 1], pts[:, 2])
    np.testing.assert_allclose(up, down, rtol=1e-12)


def test_far_guides_leave_each_other_unchanged():
    # separated by 20 waists everywhere: the potential along guide a is
    # indistinguishable from the isolated guide
    a = StraightPath((-1e-3, 0), (1, 0), 2e-3)
    b = StraightPath((-1e-3, -20e-6), (1, 0), 2e-3)
    with pytest.warns(GeometryWarning, match="no coupling"):
        both = splitter_field(a, b, beam(power=0.1), beam(power=0.1, pol="lin-y"), CYL)
    alone = line_focus(beam(power=0.1), CYL, a)
    xi = np.linspace(-2e-6, 2e-6, 101)
    v_both = both.values(np.zeros_like(xi), xi, np.zeros_like(xi))
    v_alone = alone.values(np.zeros_like(xi), xi, np.zeros_like(xi))
    np.testing.assert_allclose(v_both, v_alone, rtol=1e-6)


def test_superposition_is_exact_sum():
    ga, gb = _arc_pair(2e-6)
    fa = line_focus(beam(power=0.1), CYL, ga)
    fb = line_focus(beam(power=0.1, pol="lin-y"), CYL, gb)
    combined = splitter_field(ga, gb, beam(power=0.1), beam(power=0.1, pol="lin-y"), CYL)
    rng = np.random.default_rng(4)
    pts = rng.uniform(-9e-6, 9e-6, (100, 3))
    lhs = combined.values(*pts.T)
    rhs = fa.values(*pts.T) + fb.values(*pts.T)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=0)  # exact


# ---------------------------------------------------------------------------
# field properties


def test_nonnegative_everywhere():
    arr_spec = ArraySpec("rectangular", 125e-6, (3, 3))
    fields = [
        spherical_focus(beam(), LENS),
        array_field(beam(), LENS, arr_spec),
        line_focus(beam(power=0.1), CYL, RingPath((0, 0), 1e-3)),
    ]
    rng = np.random.default_rng(5)
    pts = rng.uniform(-2e-3, 2e-3, (100_000, 3))
    for f in fields:
        assert np.all(f.values(pts[:, 0], pts[:, 1], pts[:, 2]) >= 0.0)


def test_translation_equivariance():
    shift = np.array([3.1e-6, -2.2e-6, 1.7e-6])
    f0 = spherical_focus(beam(), LENS, (0, 0, 0))
    f1 = spherical_focus(beam(), LENS, tuple(shift))
    rng = np.random.default_rng(6)
    pts = rng.uniform(-4e-6, 4e-6, (200, 3))
    np.testing.assert_allclose(
        f1.values(*(pts + shift).T), f0.values(*pts.T), rtol=1e-10)


def test_rotation_equivariance():
    alpha = 0.83
    rot = np.array([[math.cos(alpha), -math.sin(alpha)],
                    [math.sin(alpha), math.cos(alpha)]])
    start = np.array([-1e-3, 0.2e-3])
    direction = np.array([0.8, 0.6])
    path0 = StraightPath(tuple(start), tuple(direction), 2e-3)
    path1 = StraightPath(tuple(rot @ start), tuple(rot @ direction), 2e-3)
    f0 = line_focus(beam(power=0.1), CYL, path0)
    f1 = line_focus(beam(power=0.1), CYL, path1)
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1e-3, 1e-3, (200, 2))
    z = rng.uniform(-2e-6, 2e-6, 200)
    rotated = pts @ rot.T
    np.testing.assert_allclose(
        f1.values(rotated[:, 0], rotated[:, 1], z),
        f0.values(pts[:, 0], pts[:, 1], z), rtol=1e-10)


# ---------------------------------------------------------------------------
# sampling


def test_sample_constant_field():
    const = FuncField(lambda x, y, z: np.full(np.broadcast(x, y, z).shape, 4.2))
    grid = GridSpec(((0, 1e-6), (0, 1e-6), (0, 1e-6)), 2.5e-7)
    out = sample(const, grid)
    assert out.values.shape == (5, 5, 5)
    assert np.all(out.values == 4.2)


def test_sample_refinement_is_superset():
    f = spherical_focus(beam(), LENS)
    coarse = sample(f, GridSpec(((-1e-6, 1e-6), (-1e-6, 1e-6), (0, 0)), 2e-7))
    fine = sample(f, GridSpec(((-1e-6, 1e-6), (-1e-6, 1e-6), (0, 0)), 1e-7))
    np.testing.assert_array_equal(coarse.values[:, :, 0], fine.values[::2, ::2, 0])


def test_sample_peak_recovery():
    # 50 nm spacing over a 4 um cube catches the peak within 0.5%
    f = spherical_focus(beam(), LENS)
    grid = GridSpec(((-2e-6, 2e-6), (-2e-6, 2e-6), (-2e-6, 2e-6)), 50e-9)
    out = sample(f, grid)
    assert float(out.values.max()) == pytest.approx(f.value_at((0, 0, 0)), rel=0.005)


def test_sample_matches_evaluator_at_nodes():
    f = spherical_focus(beam(), LENS)
    grid = GridSpec(((-1e-6, 1e-6), (-0.5e-6, 0.5e-6), (-1e-6, 1e-6)), 2.5e-7)
    out = sample(f, grid)
    ax, ay, az = out.axes
    X, Y, Z = np.meshgrid(ax, ay, az, indexing="ij")
    np.testing.assert_allclose(out.values, f.values(X, Y, Z), rtol=1e-12)


def test_node_budget_enforced():
    f = spherical_focus(beam(), LENS)
    grid = GridSpec(((-1e-3, 1e-3), (-1e-3, 1e-3), (-1e-3, 1e-3)), 1e-6)
    with pytest.raises(NodeBudgetError, match="budget"):
        sample(f, grid, budget=1000)


def test_node_budget_env_override(monkeypatch):
    f = spherical_focus(beam(), LENS)
    grid = GridSpec(((-1e-6, 1e-6), (-1e-6, 1e-6), (0, 0)), 2e-7)
    monkeypatch.setenv("MTD_NODE_BUDGET", "4")
    with pytest.raises(NodeBudgetError):
        sample(f, grid)
