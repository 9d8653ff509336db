import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diraclab import GridSpec, SpinorField, build_clifford
from diraclab.errors import GeometryError
from diraclab.fields import DecayProfile, manufacture_solution
from diraclab.landis import (
    VanishingCurve,
    VanishingOrder,
    ball_points,
    check_lower_bound,
    check_own_envelope,
    compute_MR,
    fit_envelope,
    fit_report,
    sphere_points,
    vanishing_curve,
)


def radial_field(grid, fn, N=2):
    r = grid.radius
    vals = np.zeros((N,) + grid.shape, dtype=complex)
    vals[0] = fn(r) / np.sqrt(2)
    vals[1] = 1j * fn(r) / np.sqrt(2)
    return SpinorField(grid, vals)


@pytest.fixture(scope="module")
def exp_field():
    g = GridSpec(2, 10.0, 512)
    return radial_field(g, lambda r: np.exp(-np.sqrt(r**2 + 0.01)))


def test_constant_field():
    g = GridSpec(2, 8.0, 64)
    u = SpinorField(g, np.full((2,) + g.shape, 0.6 - 0.8j))
    for R in (1.0, 3.0, 5.0):
        assert compute_MR(u, R, 64, 64) == pytest.approx(np.sqrt(2), rel=1e-12)


def test_exponential_radial(exp_field):
    # sup over B_1(x) at |x| = R is attained at the inner edge r = R - 1
    for R in (2.0, 4.0, 6.0):
        expect = np.exp(-np.sqrt((R - 1) ** 2 + 0.01))
        assert compute_MR(exp_field, R, 64, 1024) == pytest.approx(expect, rel=1e-3)


def test_refinement_changes_little(exp_field):
    vo = VanishingOrder(exp_field)
    for R in (3.0, 5.0):
        a = vo(R, 64, 128)
        b = vo(R, 256, 512)
        assert abs(a - b) / b < 0.01


def test_nested_point_sets():
    for n in (2, 3):
        assert np.array_equal(sphere_points(n, 64), sphere_points(n, 256)[:64])
        assert np.array_equal(ball_points(n, 100), ball_points(n, 400)[:100])
        assert np.all(np.linalg.norm(ball_points(n, 400), axis=1) <= 1 + 1e-12)
        assert np.allclose(np.linalg.norm(sphere_points(n, 64), axis=1), 1.0)


def test_monotone_in_sphere_samples(exp_field):
    vo = VanishingOrder(exp_field)
    vals = [vo(4.0, s, 128) for s in (64, 128, 256, 512)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    # more ball points can only raise the sup
    vals = [vo(4.0, 64, b) for b in (64, 128, 256)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@settings(max_examples=20, deadline=None)
@given(st.integers(-6, 6), st.floats(1.5, 6.0))
def test_normalization_covariance(k, R):
    g = GridSpec(2, 10.0, 128)
    u = radial_field(g, lambda r: np.exp(-0.5 * r) * (1 + 0.3 * np.cos(r)))
    c = 2.0**k
    assert compute_MR(u.scaled(c), R, 64, 64) == compute_MR(u, R, 64, 64) * c


def test_geometry_error(exp_field):
    with pytest.raises(GeometryError):
        compute_MR(exp_field, 9.5, 64, 64)
    with pytest.raises(ValueError):
        compute_MR(exp_field, 2.0, 32, 64)


def test_3d_constant():
    g = GridSpec(3, 6.0, 32)
    u = SpinorField(g, np.full((4,) + g.shape, 0.5 + 0j))
    assert compute_MR(u, 2.0, 64, 64) == pytest.approx(1.0, rel=1e-12)


def test_fit_exact_models():
    R = np.linspace(3, 12, 19)
    f = fit_envelope(VanishingCurve(R, np.exp(-2 * R)), 1, 0)
    assert abs(f.kappa - 2) < 1e-6
    f = fit_envelope(VanishingCurve(R, np.exp(-R * np.log(R))), 1, 1)
    assert abs(f.kappa - 1) < 1e-6
    f = fit_envelope(VanishingCurve(R, np.exp(-R * np.log(R))), 1, 1, intercept=False)
    assert abs(f.kappa - 1) < 1e-6 and f.residual < 1e-10


def test_fit_needs_positive_samples():
    R = np.linspace(3, 12, 10)
    with pytest.raises(ValueError):
        fit_envelope(VanishingCurve(R, np.zeros(10)), 1, 0)


def test_curve_invariants():
    with pytest.raises(ValueError):
        VanishingCurve([3, 2], [0.1, 0.2])
    with pytest.raises(ValueError):
        VanishingCurve([2, 3], [-0.1, 0.2])
    with pytest.raises(ValueError):
        VanishingCurve([2, 3], [0.1, 2.0], sup_norm=1.0)


def test_zero_field_fails_everywhere():
    R = np.linspace(3, 12, 10)
    chk = check_lower_bound(VanishingCurve(R, np.zeros(10)), 1, 2, 2, 1e-3)
    assert not any(chk.verdicts) and not chk.passed


def test_bound_input_checks():
    cur = VanishingCurve([3, 4], [0.1, 0.1])
    with pytest.raises(ValueError):
        check_lower_bound(cur, 0, 2, 2, 1e-3)
    with pytest.raises(ValueError):
        check_lower_bound(cur, 1, 2, 2, -1)


@pytest.fixture(scope="module")
def manufactured_curve():
    rep = build_clifford(2)
    g = GridSpec(2, 14.0, 512)
    U, V = manufacture_solution(DecayProfile.exponential(2.0), rep, g)
    return vanishing_curve(U, np.arange(3.0, 12.01, 1.0), 64, 128), V


def test_manufactured_linear_beats_quadratic_log(manufactured_curve):
    cur, V = manufactured_curve
    assert V.sup_norm <= 2.0
    assert check_lower_bound(cur, 1, 2, 2, 1e-3).passed
    f1 = fit_envelope(cur, 1, 0)
    f2 = fit_envelope(cur, 2, 2)
    assert abs(f1.kappa - 2) < 0.1
    assert f2.residual > 10 * f1.residual
    assert check_own_envelope(cur, f1).passed


def test_outputs(manufactured_curve, tmp_path):
    cur, _ = manufactured_curve
    dat = cur.to_dat(tmp_path / "c.dat")
    assert len(dat.splitlines()) == len(cur.R)
    back = np.loadtxt(tmp_path / "c.dat")
    assert np.array_equal(back[:, 1], cur.MR)
    chk = check_lower_bound(cur, 1, 2, 2, 1e-3)
    text = chk.to_csv(header_comment="generated")
    lines = text.splitlines()
    assert lines[0] == "# generated" and lines[1] == "R,M_R,bound,verdict"
    f = fit_envelope(cur, 1, 0)
    import json
    data = json.loads(fit_report(cur, [f]))
    assert data["fits"][0]["kappa"] == f.kappa


def test_deterministic(exp_field):
    a = vanishing_curve(exp_field, [2.0, 3.0, 4.0], 64, 64, workers=1)
    b = vanishing_curve(exp_field, [2.0, 3.0, 4.0], 64, 64, workers=3)
    assert np.array_equal(a.MR, b.MR)
