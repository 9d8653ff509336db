import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diraclab.errors import GeometryError, StepSizeError
from diraclab.fields import DecayProfile, GridSpec, SpinorField, manufacture_solution, random_bandlimited
from diraclab.polar import (
    A_PHASE_2D,
    RadialPotential,
    angular_basis_2d,
    apply_B,
    asymptotic_slope,
    check_angular_algebra,
    circle,
    coulomb_exponents,
    coulomb_matrix,
    decay_moments,
    decompose,
    mode_field,
    mode_for,
    polar_dirac_check,
    project_ring,
    radial_ode_solve,
    reconstruct,
    ring_samples,
    spectrum_of_b,
    step_halving_ratio,
    synthesize_ring,
)


def test_basis_half():
    modes = angular_basis_2d(0.5)
    assert len(modes) == 4
    assert sorted(m.lam for m in modes) == [-0.5, -0.5, 0.5, 0.5]


def test_basis_rejects_integer():
    with pytest.raises(ValueError):
        angular_basis_2d(1)
    with pytest.raises(ValueError):
        angular_basis_2d(-0.5)


def test_spectrum_listing():
    assert spectrum_of_b(2.5) == [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]
    assert sorted({m.lam for m in angular_basis_2d(2.5)}) == [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]
    assert spectrum_of_b(2.0, n=3) == [-2.0, -1.0, 1.0, 2.0]


def test_angular_algebra():
    rep = check_angular_algebra(angular_basis_2d(7.5), P=256)
    assert rep.gram_error < 1e-13
    assert rep.a_unitary_error < 1e-13
    assert rep.anticommutator_error < 1e-12
    assert rep.a_pairing_error < 1e-12
    assert rep.phase_modulus_error < 1e-12
    assert rep.b_selfadjoint_error < 1e-12
    assert rep.spectrum_error < 1e-12
    assert set(rep.multiplicities.values()) == {2}
    assert all(abs(p - A_PHASE_2D) < 1e-12 for p in rep.phases.values())


def test_a_on_lowest_mode():
    th = circle(256)
    v = mode_for(0.5, 1).sample(th)
    target = mode_for(-0.5, 1).sample(th)
    from diraclab.polar import apply_A, inner

    av = apply_A(v, th)
    phase = inner(av, target)
    assert abs(abs(phase) - 1) < 1e-12
    assert np.abs(av - phase * target).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_b_selfadjoint_random(seed):
    from diraclab.polar import inner

    rng = np.random.default_rng(seed)
    u = rng.normal(size=(128, 2)) + 1j * rng.normal(size=(128, 2))
    v = rng.normal(size=(128, 2)) + 1j * rng.normal(size=(128, 2))
    lhs, rhs = inner(apply_B(u), v), inner(u, apply_B(v))
    assert abs(lhs - rhs) <= 1e-12 * np.linalg.norm(u) * np.linalg.norm(v)


# -- decomposition --------------------------------------------------------------------


GRID = GridSpec(2, 8.0, 256)


def test_single_mode_profile():
    modes = angular_basis_2d(2.5)
    g = lambda r: np.exp(-(r**2) / 2)  # noqa: E731
    u = mode_field(GRID, mode_for(0.5, 1), g)
    y = np.linspace(np.log(0.3), np.log(4.0), 30)
    prof = decompose(u, modes, y, method="spectral")
    for key, p in prof.items():
        if key == (0.5, 1):
            assert np.abs(p.values - g(np.exp(y))).max() < 1e-8
        else:
            assert np.abs(p.values).max() < 1e-8


def test_single_mode_profile_spline_budget():
    g = lambda r: r * np.exp(-(r**2) / 2)  # noqa: E731
    m = mode_for(1.5, 1)
    u = mode_field(GRID, m, g)
    y = np.linspace(np.log(0.5), np.log(3.0), 10)
    prof = decompose(u, angular_basis_2d(1.5), y)
    assert np.abs(prof[m.key].values - g(np.exp(y))).max() < 1e-6


def test_zero_field_profiles():
    u = SpinorField(GRID, np.zeros((2,) + GRID.shape))
    prof = decompose(u, angular_basis_2d(1.5), np.linspace(0, 1, 5))
    assert all(np.all(p.values == 0) for p in prof.values())


def test_ring_outside_box():
    u = SpinorField(GRID, np.zeros((2,) + GRID.shape))
    with pytest.raises(GeometryError):
        ring_samples(u, np.array([7.99]))


def test_truncation_error_decreases():
    grid = GridSpec(2, 4.0, 64)
    u = random_bandlimited(grid, 2, 6, 3)
    radii = np.array([1.0, 2.0, 3.0])
    rings = ring_samples(u, radii, method="spectral")
    errs = []
    for lam_max in (1.5, 7.5, 15.5, 47.5):
        modes = angular_basis_2d(lam_max)
        back = synthesize_ring(project_ring(rings, modes), modes)
        errs.append(np.linalg.norm(back - rings) / np.linalg.norm(rings))
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-8


def test_decompose_reconstruct_round_trip():
    modes = angular_basis_2d(5.5)
    rng = np.random.default_rng(0)
    coefs = rng.normal(size=(4, len(modes))) + 1j * rng.normal(size=(4, len(modes)))
    rings = synthesize_ring(coefs, modes)
    back = project_ring(rings, modes)
    assert np.abs(back - coefs).max() < 1e-10
    from diraclab.polar import RadialProfile

    y = np.linspace(0, 1, 4)
    profiles = {m.key: RadialProfile(y, back[:, i]) for i, m in enumerate(modes)}
    assert np.abs(reconstruct(profiles, modes) - rings).max() < 1e-10


@pytest.mark.parametrize("lam,l", [(0.5, 1), (-0.5, 2), (1.5, 2), (-2.5, 1)])
def test_polar_form_of_dirac(lam, l):
    m = mode_for(lam, l)
    k = abs(m.k)

    def g(r):
        return r**k * np.exp(-(r**2))

    def dg(r):
        return (k * r ** (k - 1) if k else 0 * r) * np.exp(-(r**2)) - 2 * r * g(r)

    err = polar_dirac_check(GRID, m, g, dg, np.linspace(0.5, 3, 8))
    assert err < 1e-6


# -- radial ODE --------------------------------------------------------------------------


@pytest.mark.parametrize("n,lam", [(2, 0.5), (2, 1.5), (3, 1.0), (3, 2.0)])
def test_free_modes(n, lam):
    g, h = radial_ode_solve(n, lam, RadialPotential.zero(), (1.0, 1.0), (0.0, 4.0), 400)
    half = (n - 1) / 2
    assert np.abs(g.values - np.exp((lam - half) * g.y)).max() / np.exp(abs(lam - half) * 4) < 1e-8
    assert np.abs(h.values - np.exp(-(lam + half) * h.y)).max() < 1e-8


def test_free_mode_exact_constant():
    g, _ = radial_ode_solve(2, 0.5, RadialPotential.zero(), (1.0, 0.0), (0.0, 3.0), 100)
    assert np.all(g.values == 1.0)


@pytest.mark.parametrize("lam", [0.5, 1.5])
def test_step_halving_free(lam):
    ratio = step_halving_ratio(2, lam, RadialPotential.zero(), (1.0, 1.0), (0.0, 5.0), 100,
                               exact=lambda y: (np.exp((lam - 0.5) * y), np.exp(-(lam + 0.5) * y)))
    assert 14 <= ratio <= 18


def test_step_halving_smooth_potential():
    pot = RadialPotential(lambda y: np.exp(-y) / (1 + np.exp(y)))
    ratio = step_halving_ratio(2, 0.5, pot, (1.0, -0.5), (-2.0, 3.0), 100)
    assert 14 <= ratio <= 18


def test_step_size_guard():
    with pytest.raises(StepSizeError):
        radial_ode_solve(2, 40.5, RadialPotential.zero(), (1, 1), (0, 10), 100)
    with pytest.raises(ValueError):
        radial_ode_solve(2, 0.5, RadialPotential.zero(), (1, 1), (0, 1), 50)


def test_coulomb_exponents_examples():
    assert coulomb_exponents(2, 0.5, 0.0) == (0.0, -1.0)
    mp, mm = coulomb_exponents(2, 0.5, 0.5)
    assert abs(mm - (-1 - np.sqrt(2)) / 2) < 1e-15
    eig = np.sort(np.linalg.eigvals(coulomb_matrix(2, 0.5, 0.5)).real)
    np.testing.assert_allclose(eig, [mm, mp], atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(2, 8), j=st.integers(0, 6), alpha=st.floats(-5, 5))
def test_coulomb_trace_determinant(n, j, alpha):
    lam = j + (n - 1) / 2
    mp, mm = coulomb_exponents(n, lam, alpha)
    half = (n - 1) / 2
    assert abs((mp + mm) + (n - 1)) <= 1e-12 * max(1, n)
    assert abs(mp * mm - (half**2 - lam**2 - alpha**2)) <= 1e-12 * max(1.0, lam**2 + alpha**2)


def test_coulomb_slopes_half():
    mp, mm = coulomb_exponents(2, 0.5, 0.5)
    pot = RadialPotential.coulomb(0.5)
    g, h = radial_ode_solve(2, 0.5, pot, (1.0, 0.3), (0.0, 30.0), 3000)
    assert abs(asymptotic_slope(g, h, "right") - mp) < 1e-6
    g, h = radial_ode_solve(2, 0.5, pot, (1.0, 0.3), (0.0, -30.0), 3000)
    # backward integration lets the decaying mode dominate without roundoff pollution
    assert abs(asymptotic_slope(g, h, "left") - mm) < 1e-6


def test_two_dimensional_coupling_phase():
    # in the explicit planar basis the coupling carries the factor i, turning
    # lambda^2 + alpha^2 into lambda^2 - alpha^2 for a real Coulomb strength
    lam, alpha = 1.5, 0.5
    pot = RadialPotential.coulomb(alpha)
    g, h = radial_ode_solve(2, lam, pot, (1.0, 0.3), (0.0, 30.0), 3000, coupling_phase=1j)
    expect = -0.5 + np.sqrt(lam**2 - alpha**2)
    assert abs(asymptotic_slope(g, h, "right") - expect) < 1e-6
    assert coulomb_exponents(2, lam, 1j * alpha)[0] == pytest.approx(expect, abs=1e-14)


# -- tails ---------------------------------------------------------------------------------


def test_decay_moments_zero():
    u = SpinorField(GRID, np.zeros((2,) + GRID.shape))
    out = decay_moments(u, [1, 2], [1.0, 2.0])
    assert out["tail"] == [0.0, 0.0]


def test_decay_moments_gaussian(rep2):
    grid = GridSpec(2, 8.0, 128)
    u, _ = manufacture_solution(DecayProfile.gaussian(1.0), rep2, grid)
    out = decay_moments(u, [2, 6], [1.0, 2.0, 3.0, 4.0])
    tails = np.array(out["tail"])
    assert np.all(np.diff(tails) <= 0)
    m6 = np.array(out["moments"][6])
    ratios = m6[1:] / m6[:-1]
    assert np.all(np.diff(ratios) < 0) and ratios[-1] < 1e-3


def test_decay_moments_power_tail():
    grid = GridSpec(2, 16.0, 256)
    r = grid.radius
    mag = np.maximum(r, 1.0) ** -3.0
    u = SpinorField(grid, np.array([mag, np.zeros_like(mag)]))
    out = decay_moments(u, [2, 8], [1.5, 2.0, 3.0, 4.0])
    m8 = np.array(out["moments"][8])
    assert np.all(np.diff(m8) > 0)
    m2 = np.array(out["moments"][2])
    assert np.all(np.diff(m2) < 0)


def test_decay_moments_ladder_outside():
    u = SpinorField(GRID, np.zeros((2,) + GRID.shape))
    with pytest.raises(GeometryError):
        decay_moments(u, [1], [1.0, 9.0])
