import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diraclab.carleman import (
    CarlemanWeight,
    TestFunctionSpec,
    classify,
    drift_coefficient,
    polar_oracle,
    random_bump_1d,
    random_specs,
    reports_to_csv,
    smooth_bump,
    summarize,
    sweep,
    verify_carleman_1d,
    verify_carleman_general,
    verify_carleman_logsq,
    verify_many,
)
from diraclab.errors import GeometryError, SupportError
from diraclab.fields import GridSpec, SpinorField

SMALL = dict(L=4.0, M=128)


def test_drift_examples():
    assert drift_coefficient(CarlemanWeight.log_one_plus_power(2, 1), 1.0) == pytest.approx(1.0, abs=1e-15)
    assert drift_coefficient(CarlemanWeight.log_one_plus_power(1, 1), 1.0) == pytest.approx(0.25, abs=1e-15)
    r = np.array([0.3, 1.0, 2.7])
    np.testing.assert_allclose(drift_coefficient(CarlemanWeight.power_law(2, 3), r), 4.0, rtol=1e-15)
    with pytest.raises(ValueError):
        drift_coefficient(CarlemanWeight.power_law(2, 1), 0.0)
    with pytest.raises(ValueError):
        drift_coefficient(CarlemanWeight.one_d_exp(1.0), 1.0)


@pytest.mark.parametrize(
    "weight",
    [CarlemanWeight.log_squared(1.3), CarlemanWeight.power_law(0.5, 2), CarlemanWeight.power_law(3, 1),
     CarlemanWeight.log_one_plus_power(1, 1), CarlemanWeight.log_one_plus_power(3, 2)],
)
def test_drift_matches_finite_differences(weight):
    r = np.linspace(0.3, 3.0, 7)
    h = 1e-4
    b = weight.exponent
    fd = (b(r + h) - 2 * b(r) + b(r - h)) / h**2 + (b(r + h) - b(r - h)) / (2 * h * r)
    np.testing.assert_allclose(drift_coefficient(weight, r), fd, rtol=1e-6)


def test_weight_parameters_positive():
    with pytest.raises(ValueError):
        CarlemanWeight.log_squared(0)
    with pytest.raises(ValueError):
        CarlemanWeight.power_law(-1, 1)
    with pytest.raises(ValueError):
        CarlemanWeight("Bogus", tau=1)


def test_log_squared_weight_monotone_in_tau():
    r = np.linspace(0.05, 5, 400)
    w1 = np.exp(CarlemanWeight.log_squared(1.0).log_weight(r))
    w2 = np.exp(CarlemanWeight.log_squared(2.0).log_weight(r))
    assert np.all(w2[r > 1] >= w1[r > 1])
    assert np.all(w2[r < 1] >= w1[r < 1])  # (log r)^2 >= 0 on both sides
    assert np.all(w2 >= w1)


def test_spec_validation():
    with pytest.raises(GeometryError):
        TestFunctionSpec(2.0, 1.0)
    with pytest.raises(SupportError):
        TestFunctionSpec(1.0, 3.99).validate(2)
    with pytest.raises(GeometryError):
        TestFunctionSpec(1.0, 2.0, bandwidth=100).validate(2)


def test_realized_function_is_supported_in_annulus(rep2):
    spec = TestFunctionSpec(0.7, 2.2, seed=3, **SMALL)
    u = spec.realize(rep2)
    r = u.grid.radius
    mag = u.magnitude()
    assert mag[(r <= 0.7) | (r >= 2.2)].max() == 0.0
    assert mag.max() > 0


def test_closed_form_matches_grid(rep2):
    spec = TestFunctionSpec(0.5, 2.0, seed=5, bandwidth=6, **SMALL)
    u = spec.realize(rep2)
    grid = u.grid
    idx = [(40, 70), (64, 90), (30, 50)]
    pts = np.array([[grid.axis[i], grid.axis[j]] for i, j in idx])
    vals, _ = spec.evaluate(rep2, pts)
    for (i, j), v in zip(idx, vals):
        np.testing.assert_allclose(u.values[:, i, j], v, atol=1e-13)


def test_zero_function(rep2):
    grid = GridSpec(2, 4.0, 64)
    zero = SpinorField(grid, np.zeros((2,) + grid.shape), support_hint=(0.5, 2.0))
    rep = verify_carleman_logsq(rep2, zero, 1.0)
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.ratio == 1.0
    gen = verify_carleman_general(rep2, zero, CarlemanWeight.power_law(1, 2))
    assert gen.ratio == 1.0 and gen.verdict == "pass"
    spec = TestFunctionSpec(0.5, 2.0, amplitude=0.0, **SMALL)
    assert verify_carleman_logsq(rep2, spec, 2.0).ratio == 1.0


def test_reference_bump_against_polar_oracle(rep2):
    spec = TestFunctionSpec(0.5, 2.0, seed=42, bandwidth=16, M=512)
    rep = verify_carleman_logsq(rep2, spec, 1.0)
    lhs, rhs = polar_oracle(rep2, spec, CarlemanWeight.log_squared(1.0))
    assert abs(rep.lhs - lhs) / lhs < 1e-6
    assert abs(rep.rhs - rhs) / rhs < 1e-6
    assert rep.ratio >= 1


def test_general_weight_against_polar_oracle(rep2):
    spec = TestFunctionSpec(0.3, 3.0, seed=7, bandwidth=10, M=256)
    w = CarlemanWeight.log_one_plus_power(3, 1)
    rep = verify_carleman_general(rep2, spec, w)
    lhs, rhs = polar_oracle(rep2, spec, w)
    assert abs(rep.lhs - lhs) / lhs < 1e-6
    assert abs(rep.rhs - rhs) / rhs < 1e-6


def test_random_bumps_satisfy_inequalities(rep2):
    weights = [CarlemanWeight.log_squared(t) for t in (0.5, 1, 2, 5)]
    weights += [CarlemanWeight.power_law(1, 2), CarlemanWeight.log_one_plus_power(3, 1)]
    reports = sweep(weights, random_specs(10, seed=1, M=256))
    assert len(reports) == 60
    assert all(r.ok for r in reports), summarize(reports)


def test_general_verifier_rejects_logsq(rep2):
    with pytest.raises(ValueError):
        verify_carleman_general(rep2, TestFunctionSpec(1, 2, **SMALL), CarlemanWeight.log_squared(1))


def test_overflow_is_reported(rep2):
    spec = TestFunctionSpec(0.2, 3.5, seed=1, **SMALL)
    rep = verify_carleman_logsq(rep2, spec, 400.0)
    assert rep.verdict == "error: parameter-out-of-range"
    assert math.isnan(rep.ratio)


def test_three_dimensional_trial(rep3):
    spec = TestFunctionSpec(0.8, 3.0, seed=2, bandwidth=4, L=4.0, M=64)
    reports = verify_many(rep3, spec, [CarlemanWeight.log_squared(1.0), CarlemanWeight.power_law(2, 1)])
    assert all(r.ratio > 1 for r in reports)


@settings(max_examples=20, deadline=None)
@given(c_re=st.floats(-5, 5), c_im=st.floats(-5, 5), seed=st.integers(0, 1000))
def test_ratio_scaling_covariance(c_re, c_im, seed):
    from diraclab.clifford import build_clifford

    c = complex(c_re, c_im)
    if abs(c) < 1e-3:
        c = 1.0
    rep = build_clifford(2)
    spec = TestFunctionSpec(0.5, 2.5, seed=seed, bandwidth=4, L=4.0, M=64)
    u = spec.realize(rep)
    a = verify_carleman_logsq(rep, u, 1.0)
    b = verify_carleman_logsq(rep, u.scaled(c), 1.0)
    assert abs(a.ratio - b.ratio) <= 1e-13 * a.ratio


def test_ratio_exact_under_power_of_two_scaling(rep2):
    u = TestFunctionSpec(0.5, 2.5, seed=9, bandwidth=4, L=4.0, M=64).realize(rep2)
    assert verify_carleman_logsq(rep2, u, 2.0).ratio == verify_carleman_logsq(rep2, u.scaled(4.0), 2.0).ratio


def test_classify():
    assert classify(1.0) == "pass"
    assert classify(0.9995) == "pass (discretization)"
    assert classify(0.99) == "fail"
    assert classify(math.nan) == "fail"


# -- sweep plumbing -------------------------------------------------------------------


def test_sweep_empty():
    assert sweep([], [TestFunctionSpec(1, 2, **SMALL)], 3) == []


def test_sweep_counts_and_min_ratio():
    weights = [CarlemanWeight.log_squared(t) for t in (0.5, 1, 2, 5)]
    spec = TestFunctionSpec(0.5, 3.0, bandwidth=4, L=4.0, M=64)
    reports = sweep(weights, [spec], 250)
    assert len(reports) == 1000
    s = summarize(reports)
    assert s["reports"] == 1000 and s["min_ratio"] >= 1 - 1e-3


def test_sweep_deterministic_and_threaded():
    weights = [CarlemanWeight.log_squared(1), CarlemanWeight.power_law(2, 1)]
    specs = [TestFunctionSpec(0.5, 2.5, seed=4, **SMALL), TestFunctionSpec(0.5, 2.5, seed=4, **SMALL)]
    a = sweep(weights, specs, 2, workers=1)
    b = sweep(weights, specs, 2, workers=3)
    assert [r.ratio for r in a] == [r.ratio for r in b]
    assert a[0].ratio == a[4].ratio and a[1].lhs == a[5].lhs  # duplicated spec
    assert reports_to_csv(a) == reports_to_csv(b)


def test_sweep_aggregates_errors():
    weights = [CarlemanWeight.log_squared(1), CarlemanWeight.one_d_exp(1)]
    bad = TestFunctionSpec(0.5, 2.5, bandwidth=50, L=4.0, M=64)
    good = TestFunctionSpec(0.5, 2.5, **SMALL)
    reports = sweep(weights, [bad, good])
    assert [r.verdict.startswith("error") for r in reports] == [True, True, False, True]
    assert reports[2].ok


def test_csv_schema():
    reports = sweep([CarlemanWeight.log_squared(1)], [TestFunctionSpec(0.5, 2.5, seed=1, **SMALL)])
    text = reports_to_csv(reports, header_comment="run at noon")
    lines = text.splitlines()
    assert lines[0] == "# run at noon"
    assert lines[1] == "weight_variant,params,seed,M,r_min,r_max,lhs,rhs,ratio,verdict"
    row = lines[2].split(",")
    assert row[0] == "LogSquared" and float(row[8]) == reports[0].ratio


# -- one dimension ------------------------------------------------------------------------


Y = -4 + 8 * np.arange(8192) / 8192


def test_1d_bump():
    phi = smooth_bump(Y)
    rep = verify_carleman_1d(phi, 1.0, y=Y)
    assert rep.ratio >= 1


def test_1d_zero():
    rep = verify_carleman_1d(np.zeros_like(Y), 2.0, y=Y)
    assert rep.lhs == rep.rhs == 0.0 and rep.ratio == 1.0


def test_1d_support_violation():
    with pytest.raises(SupportError):
        verify_carleman_1d(np.ones_like(Y), 1.0, y=Y)


@pytest.mark.parametrize("nu", [0.5, 2.0, 8.0])
def test_1d_cosine_closed_form(nu):
    # for phi = cos(pi y / 2) on (-1, 1) the ratio is (8 nu^2 + pi^2) / (4 nu^2)
    def phi(y):
        return np.where(np.abs(y) < 1, np.cos(np.pi * y / 2), 0.0)

    def dphi(y):
        return np.where(np.abs(y) < 1, -np.pi / 2 * np.sin(np.pi * y / 2), 0.0)

    y = -2 + 4 * (np.arange(2**16) + 0.5) / 2**16  # no node on the kinks
    rep = verify_carleman_1d(phi, nu, y=y, dphi=dphi)
    exact = (8 * nu**2 + np.pi**2) / (4 * nu**2)
    assert abs(rep.ratio - exact) / exact < 1e-6
    assert rep.ratio >= 1


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), nu=st.sampled_from([0.5, 1.0, 2.0, 8.0]))
def test_1d_random_bumps(seed, nu):
    phi = random_bump_1d(np.random.default_rng(seed), Y)
    rep = verify_carleman_1d(phi, nu, y=Y)
    assert rep.ratio >= 1 - 1e-6


def test_invariant_under_conjugated_representation():
    from diraclab.clifford import build_clifford, conjugate_rep, random_unitary
    from diraclab.regularity import cz_ratio

    rep = build_clifford(2)
    q = random_unitary(rep.N, seed=7)
    other = conjugate_rep(rep, q)
    spec = random_specs(1, 4, L=4.0, M=128)[0]
    u = spec.realize(rep)
    v = SpinorField(u.grid, np.einsum("ij,j...->i...", q, u.values), support_hint=u.support_hint)
    for w in (CarlemanWeight.log_squared(2.0), CarlemanWeight.power_law(1.0, 1.0)):
        a = verify_many(rep, u, [w])[0].ratio
        b = verify_many(other, v, [w])[0].ratio
        assert b == pytest.approx(a, rel=1e-12)
    assert cz_ratio(other, v, 4.0) == pytest.approx(cz_ratio(rep, u, 4.0), rel=1e-12)
