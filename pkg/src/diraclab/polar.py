"""Polar form of the Dirac operator: angular modes and radial ODEs in y = log r.

In the plane, with the Pauli representation, the angular operators are

    A(theta) = -i (cos(theta) sigma_1 + sin(theta) sigma_2)
    B        = -i sigma_3 d/dtheta + 1/2

and D_2 = e^{-y} A [d_y + 1/2 - B].  The B-eigenfunctions are
e^{ik theta} e_1 / sqrt(2 pi) (eigenvalue k + 1/2) and
e^{ik theta} e_2 / sqrt(2 pi) (eigenvalue 1/2 - k).  Here A maps the
lambda-mode to -i times the (-lambda)-mode; the phase is recorded, since
A^2 = -1 rules out choosing it equal to 1 for every pair.

A mode profile f_lambda(y) = <U(e^y, .), v_lambda> of a solution with
radial scalar potential obeys

    f_lambda' + ((n-1)/2 - lambda) f_lambda = phi e^y Vt(y) f_{-lambda},
    Vt(y) = -V(e^y),

where phi is the inverse of the A-phase (phi = i for the basis above,
phi = 1 when the basis is normalized so that A v_lambda = v_{-lambda}).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .clifford import CliffordRep, build_clifford
from .errors import DimensionError, GeometryError, StepSizeError
from .fields import DiracConfig, GridSpec, Interpolator, SpinorField, apply_dirac

A_PHASE_2D = -1j  # A v_{lambda,l} = A_PHASE_2D * v_{-lambda,l}


def _half_integer(x) -> Fraction:
    f = Fraction(x).limit_denominator(1000)
    if f.denominator != 2 or abs(float(f) - float(x)) > 1e-12:
        raise ValueError(f"{x!r} is not a half-integer")
    return f


@dataclass(frozen=True)
class AngularMode:
    """v_{lambda,l} on the circle: e^{ik theta} e_component / sqrt(2 pi)."""

    n: int
    lam: float
    l: int
    k: int
    component: int

    def sample(self, theta: np.ndarray) -> np.ndarray:
        """Values of shape (len(theta), 2)."""
        out = np.zeros((theta.size, 2), dtype=complex)
        out[:, self.component] = np.exp(1j * self.k * theta) / np.sqrt(2 * np.pi)
        return out

    @property
    def key(self) -> tuple[float, int]:
        return (self.lam, self.l)


def mode_for(lam, l: int) -> AngularMode:
    """Label l = 1 uses e_1 for lambda > 0 and e_2 for lambda < 0; l = 2 the other one."""
    lam = float(_half_integer(lam))
    if l not in (1, 2):
        raise ValueError("n = 2 eigenspaces are two-dimensional: l in {1, 2}")
    first = 0 if lam > 0 else 1
    comp = first if l == 1 else 1 - first
    k = int(round(lam - 0.5)) if comp == 0 else int(round(0.5 - lam))
    return AngularMode(2, lam, l, k, comp)


def angular_basis_2d(lam_max) -> list[AngularMode]:
    """All modes with |lambda| <= lam_max, ordered by lambda then l."""
    top = _half_integer(lam_max)
    if top < Fraction(1, 2):
        raise ValueError("lambda_max must be at least 1/2")
    lams = [Fraction(2 * j + 1, 2) for j in range(int(top - Fraction(1, 2)) + 1)]
    out = []
    for lam in sorted([-x for x in lams] + lams):
        for l in (1, 2):
            out.append(mode_for(lam, l))
    return out


def spectrum_of_b(lam_max, n: int = 2) -> list[float]:
    """Eigenvalues +-(N0 + (n-1)/2) up to lam_max, increasing."""
    half = (n - 1) / 2
    pos = [half + j for j in range(int(math.floor(float(lam_max) - half + 1e-9)) + 1)]
    return sorted([-p for p in pos] + pos)


# -- operators on a discretized circle -----------------------------------------------------


def circle(P: int = 256) -> np.ndarray:
    return 2 * np.pi * np.arange(P) / P


def _ddtheta(values: np.ndarray) -> np.ndarray:
    P = values.shape[0]
    k = np.fft.fftfreq(P, 1.0 / P)
    if P % 2 == 0:
        k[P // 2] = 0.0
    return np.fft.ifft(1j * k[:, None] * np.fft.fft(values, axis=0), axis=0)


def apply_B(values: np.ndarray) -> np.ndarray:
    """B = -i sigma_3 d/dtheta + 1/2 on samples of shape (P, 2)."""
    d = _ddtheta(values)
    return -1j * d * np.array([1.0, -1.0]) + 0.5 * values


def a_matrix(theta: np.ndarray, rep: CliffordRep | None = None) -> np.ndarray:
    """A(theta) = -i (cos theta alpha_1 + sin theta alpha_2), shape (P, 2, 2)."""
    rep = rep or build_clifford(2)
    return -1j * (np.cos(theta)[:, None, None] * rep.alphas[0] + np.sin(theta)[:, None, None] * rep.alphas[1])


def apply_A(values: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return np.einsum("pab,pb->pa", a_matrix(theta), values)


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """<u, v> on L^2(S^1)^2, conjugate-linear in the second slot."""
    return complex(np.sum(u * v.conj()) * (2 * np.pi / u.shape[0]))


@dataclass
class AlgebraReport:
    gram_error: float
    a_unitary_error: float
    anticommutator_error: float
    eigen_error: float
    a_pairing_error: float
    phase_modulus_error: float
    b_selfadjoint_error: float
    spectrum: list
    spectrum_error: float
    multiplicities: dict
    phases: dict

    @property
    def max_error(self) -> float:
        return max(self.gram_error, self.a_unitary_error, self.anticommutator_error, self.eigen_error,
                   self.a_pairing_error, self.phase_modulus_error, self.b_selfadjoint_error,
                   self.spectrum_error)

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_error < tol

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["phases"] = {f"{k[0]:+g},{k[1]}": [v.real, v.imag] for k, v in self.phases.items()}
        d["multiplicities"] = {f"{k:+g}": v for k, v in self.multiplicities.items()}
        d["max_error"] = self.max_error
        return d


def check_angular_algebra(modes: list[AngularMode], P: int = 256, seed: int = 0) -> AlgebraReport:
    """Verify the angular identities on a P-point circle.

    A*A = I pointwise, (AB + BA) v = 0 on every mode, B v = lambda v,
    A v_{lambda,l} = phase * v_{-lambda,l} with |phase| = 1, B self-adjoint
    on random samples, and the Rayleigh-Ritz spectrum of B on the span.
    """
    th = circle(P)
    samples = [m.sample(th) for m in modes]
    gram = np.array([[inner(a, b) for b in samples] for a in samples])
    gram_err = float(np.abs(gram - np.eye(len(modes))).max())
    A = a_matrix(th)
    aa = np.einsum("pba,pbc->pac", A.conj(), A)
    unit_err = float(np.abs(aa - np.eye(2)).max())
    anti = eig = 0.0
    for m, v in zip(modes, samples):
        bv = apply_B(v)
        eig = max(eig, float(np.abs(bv - m.lam * v).max()))
        anti = max(anti, float(np.abs(apply_A(bv, th) + apply_B(apply_A(v, th))).max()))
    lookup = {m.key: s for m, s in zip(modes, samples)}
    pair_err = mod_err = 0.0
    phases = {}
    for m, v in zip(modes, samples):
        target = lookup.get((-m.lam, m.l))
        if target is None:
            continue
        av = apply_A(v, th)
        phase = inner(av, target)
        phases[m.key] = phase
        mod_err = max(mod_err, abs(abs(phase) - 1.0))
        pair_err = max(pair_err, float(np.abs(av - phase * target).max()))
    rng = np.random.default_rng(seed)
    # random trigonometric samples; B is Hermitian on the discrete circle
    u = rng.normal(size=(P, 2)) + 1j * rng.normal(size=(P, 2))
    w = rng.normal(size=(P, 2)) + 1j * rng.normal(size=(P, 2))
    sa = abs(inner(apply_B(u), w) - inner(u, apply_B(w))) / (np.linalg.norm(u) * np.linalg.norm(w))
    ritz = np.array([[inner(apply_B(b), a) for b in samples] for a in samples])
    spec = np.sort(np.linalg.eigvalsh(0.5 * (ritz + ritz.conj().T)))
    expected = np.sort(np.array([m.lam for m in modes]))
    mult: dict[float, int] = {}
    for lam in expected:
        mult[float(lam)] = mult.get(float(lam), 0) + 1
    return AlgebraReport(
        gram_error=gram_err,
        a_unitary_error=unit_err,
        anticommutator_error=anti,
        eigen_error=eig,
        a_pairing_error=pair_err,
        phase_modulus_error=mod_err,
        b_selfadjoint_error=float(sa),
        spectrum=[float(s) for s in spec],
        spectrum_error=float(np.abs(spec - expected).max()),
        multiplicities=mult,
        phases=phases,
    )


# -- mode decomposition -------------------------------------------------------------------


@dataclass
class RadialProfile:
    """Samples of a mode coefficient on a uniform grid in y = log r."""

    y: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        d = np.diff(self.y)
        if self.y.ndim != 1 or self.y.size != self.values.size:
            raise ValueError("y and values must be matching 1D arrays")
        if self.y.size > 1 and (np.any(d <= 0) or np.ptp(d) > 1e-9 * max(1.0, abs(d[0]))):
            raise ValueError("y grid must be strictly increasing and uniform")

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.y)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["y", "re", "im"])
        for y, v in zip(self.y, self.values):
            w.writerow([repr(float(y)), repr(float(v.real)), repr(float(v.imag))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def project_ring(ring: np.ndarray, modes: list[AngularMode]) -> np.ndarray:
    """Mode coefficients of ring samples (..., P, 2); returns (..., len(modes))."""
    P = ring.shape[-2]
    th = circle(P)
    basis = np.array([m.sample(th) for m in modes])  # (K, P, 2)
    return np.einsum("...pa,kpa->...k", ring, basis.conj()) * (2 * np.pi / P)


def synthesize_ring(coefs: np.ndarray, modes: list[AngularMode], P: int = 256) -> np.ndarray:
    th = circle(P)
    basis = np.array([m.sample(th) for m in modes])
    return np.einsum("...k,kpa->...pa", coefs, basis)


def ring_samples(u: SpinorField, radii: np.ndarray, P: int = 256, method: str = "spline") -> np.ndarray:
    """U interpolated on circles of the given radii: shape (len(radii), P, 2)."""
    if u.n != 2 or u.N != 2:
        raise DimensionError("ring sampling is implemented for two-component fields in 2D")
    radii = np.asarray(radii, dtype=float)
    if radii.max() > u.grid.L - 2 * u.grid.h:
        raise GeometryError(f"ring radius {radii.max()} leaves the box (L={u.grid.L})")
    th = circle(P)
    pts = np.stack(
        [(radii[:, None] * np.cos(th)).ravel(), (radii[:, None] * np.sin(th)).ravel()], axis=1
    )
    vals = Interpolator(u.grid, u.values, method)(pts)  # (2, K)
    return vals.T.reshape(radii.size, P, 2)


def decompose(u: SpinorField, modes: list[AngularMode], y: np.ndarray, P: int = 256,
              method: str = "spline") -> dict:
    """f_{lambda,l}(e^y) = <U(e^y, .), v_{lambda,l}> for every mode."""
    y = np.asarray(y, dtype=float)
    rings = ring_samples(u, np.exp(y), P, method)
    coefs = project_ring(rings, modes)
    return {m.key: RadialProfile(y, coefs[:, i]) for i, m in enumerate(modes)}


def reconstruct(profiles: dict, modes: list[AngularMode], P: int = 256) -> np.ndarray:
    """Sum f v over the given modes on each ring: shape (len(y), P, 2)."""
    coefs = np.stack([profiles[m.key].values for m in modes], axis=-1)
    return synthesize_ring(coefs, modes, P)


def mode_field(grid: GridSpec, mode: AngularMode, g: Callable) -> SpinorField:
    """g(r) v_{lambda,l}(theta) on a Cartesian grid (g should vanish at 0 like r^|k|)."""
    x, y = grid.coords
    r = grid.radius
    th = np.arctan2(y, x)
    vals = np.zeros((2,) + grid.shape, dtype=complex)
    vals[mode.component] = g(r) * np.exp(1j * mode.k * th) / np.sqrt(2 * np.pi)
    return SpinorField(grid, vals)


def polar_dirac_check(grid: GridSpec, mode: AngularMode, g: Callable, dg: Callable, radii,
                      P: int = 256, method: str = "spline") -> float:
    """Relative ring error between apply_dirac(g v) and e^{-y} A [d_y + 1/2 - B](g v)."""
    u = mode_field(grid, mode, g)
    du = apply_dirac(DiracConfig(build_clifford(2)), u)
    radii = np.asarray(radii, dtype=float)
    got = ring_samples(du, radii, P, method)
    th = circle(P)
    av = apply_A(mode.sample(th), th)
    # d_y g(e^y) = r g'(r)
    coef = (radii * dg(radii) + (0.5 - mode.lam) * g(radii)) / radii
    expect = coef[:, None, None] * av[None]
    return float(np.linalg.norm(got - expect) / np.linalg.norm(expect))


# -- radial ODE ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialPotential:
    """Vt(y) = -V(e^y) for a radial scalar potential V."""

    tilde_v: Callable
    coulomb_alpha: complex | None = None

    @classmethod
    def zero(cls) -> "RadialPotential":
        return cls(lambda y: np.zeros_like(np.asarray(y, dtype=float)), None)

    @classmethod
    def coulomb(cls, alpha) -> "RadialPotential":
        """V = alpha / r, so e^y Vt = -alpha."""
        return cls(lambda y: -alpha * np.exp(-np.asarray(y, dtype=float)), alpha)

    @classmethod
    def from_v(cls, V: Callable) -> "RadialPotential":
        return cls(lambda y: -V(np.exp(np.asarray(y, dtype=float))))

    def coupling(self, y) -> np.ndarray:
        """e^y Vt(y), bounded under the |V| <~ 1/r hypothesis."""
        if self.coulomb_alpha is not None:
            return np.full(np.shape(y), -self.coulomb_alpha, dtype=complex)
        y = np.asarray(y, dtype=float)
        return np.exp(y) * np.asarray(self.tilde_v(y), dtype=complex)


def _rhs_matrix(n, lam, phase, c):
    half = (n - 1) / 2
    return np.array([[-(half - lam), phase * c], [phase * c, -(half + lam)]], dtype=complex)


def radial_ode_solve(n: int, lam: float, pot: RadialPotential, init, y_range, steps: int,
                     coupling_phase: complex = 1.0) -> tuple[RadialProfile, RadialProfile]:
    """Classical RK4 for g = f_lambda, h = f_{-lambda}:

        g' + ((n-1)/2 - lambda) g = phase e^y Vt h
        h' + ((n-1)/2 + lambda) h = phase e^y Vt g

    ``init`` = (g, h) at y_range[0].  If y_range[1] < y_range[0] the system
    is integrated backwards; profiles are always returned on increasing y.
    """
    if steps < 100:
        raise ValueError("steps must be at least 100")
    if n < 2:
        raise DimensionError("n must be >= 2")
    y0, y1 = map(float, y_range)
    step = (y1 - y0) / steps
    ys = y0 + step * np.arange(steps + 1)
    mids = ys[:-1] + 0.5 * step
    c_nodes = pot.coupling(ys)
    c_mids = pot.coupling(mids)
    if not (np.all(np.isfinite(c_nodes)) and np.all(np.isfinite(c_mids))):
        raise ValueError("potential is not finite on the integration range")
    coef = max(abs((n - 1) / 2 - lam), abs((n - 1) / 2 + lam), float(np.abs(c_nodes).max()))
    if abs(step) * coef > 0.5:
        raise StepSizeError(f"|step| * max coefficient = {abs(step) * coef:.3f} > 0.5; use more steps")
    out = np.empty((steps + 1, 2), dtype=complex)
    z = np.asarray(init, dtype=complex).copy()
    out[0] = z
    for i in range(steps):
        a0 = _rhs_matrix(n, lam, coupling_phase, c_nodes[i])
        am = _rhs_matrix(n, lam, coupling_phase, c_mids[i])
        a1 = _rhs_matrix(n, lam, coupling_phase, c_nodes[i + 1])
        k1 = a0 @ z
        k2 = am @ (z + 0.5 * step * k1)
        k3 = am @ (z + 0.5 * step * k2)
        k4 = a1 @ (z + step * k3)
        z = z + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = z
    if step < 0:
        ys, out = ys[::-1], out[::-1]
    return RadialProfile(ys, out[:, 0]), RadialProfile(ys, out[:, 1])


def coulomb_exponents(n: int, lam: float, alpha) -> tuple:
    """Eigenvalues -(n-1)/2 +- sqrt(lambda^2 + alpha^2) of the Coulomb system.

    Real for real alpha; a complex alpha (e.g. when the coupling phase is i)
    gives the principal complex square root.
    """
    disc = lam * lam + alpha * alpha
    if isinstance(disc, complex) or (np.iscomplexobj(disc)):
        root = complex(np.sqrt(complex(disc)))
    else:
        root = math.sqrt(disc) if disc >= 0 else complex(0, math.sqrt(-disc))
    base = -(n - 1) / 2
    return base + root, base - root


def coulomb_matrix(n: int, lam: float, alpha) -> np.ndarray:
    half = (n - 1) / 2
    return np.array([[-(half + lam), -alpha], [-alpha, -(half - lam)]], dtype=complex)


def asymptotic_slope(g: RadialProfile, h: RadialProfile, end: str = "right", span: int = 1) -> float:
    """d log|(g, h)| / dy measured over the last ``span`` intervals at one end."""
    mag = np.sqrt(np.abs(g.values) ** 2 + np.abs(h.values) ** 2)
    y = g.y
    if end == "right":
        return float((np.log(mag[-1]) - np.log(mag[-1 - span])) / (y[-1] - y[-1 - span]))
    return float((np.log(mag[span]) - np.log(mag[0])) / (y[span] - y[0]))


def step_halving_ratio(n: int, lam: float, pot: RadialPotential, init, y_range, steps: int,
                       exact: Callable | None = None, coupling_phase: complex = 1.0) -> float:
    """err(steps) / err(2 steps) at the final point; about 16 for a fourth-order method.

    Without ``exact`` the errors are taken against a 4*steps solution.
    """
    def end(k):
        g, h = radial_ode_solve(n, lam, pot, init, y_range, k, coupling_phase)
        i = -1 if y_range[1] >= y_range[0] else 0
        return np.array([g.values[i], h.values[i]])

    if exact is None:
        ref = end(4 * steps)
        ref = ref + (ref - end(2 * steps)) / 15.0
    else:
        ref = np.asarray(exact(y_range[1]), dtype=complex)
    e1 = np.linalg.norm(end(steps) - ref)
    e2 = np.linalg.norm(end(2 * steps) - ref)
    return float(e1 / e2)


# -- tail moments ----------------------------------------------------------------------------


def decay_moments(u: SpinorField, ks, ladder) -> dict:
    """Tail integrals T(R) = int_{|x| >= R} |U|^2 and R^k T(R) on a ladder of radii."""
    ladder = np.asarray(ladder, dtype=float)
    if ladder.size == 0 or ladder.max() > u.grid.L:
        raise GeometryError(f"R-ladder must stay inside the box (L={u.grid.L})")
    if np.any(np.diff(ladder) <= 0):
        raise ValueError("R-ladder must be increasing")
    r = u.grid.radius.ravel()
    dens = np.sum(np.abs(u.values) ** 2, axis=0).ravel() * u.grid.cell_volume
    order = np.argsort(r)
    r_sorted = r[order]
    # cumulative sums from the outside in keep T(R) monotone in R
    tail_cum = np.cumsum(dens[order][::-1])[::-1]
    idx = np.searchsorted(r_sorted, ladder, side="left")
    tails = np.array([tail_cum[i] if i < r_sorted.size else 0.0 for i in idx])
    return {
        "R": ladder.tolist(),
        "tail": tails.tolist(),
        "moments": {int(k): (ladder ** k * tails).tolist() for k in ks},
    }
