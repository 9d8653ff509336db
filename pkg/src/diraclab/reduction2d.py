"""Two-dimensional Dirac system written with the Cauchy-Riemann operators.

With partial = d_x - i d_y and dbar = d_x + i d_y the equation
(D_2 + V) U = 0 is the pair

    i dbar U1 = V21 U1 + V22 U2
    i partial U2 = V11 U1 + V12 U2

Under structural assumptions on V, or for real U, this collapses to a single
scalar equation for a combination S of U1 and U2 with a bounded coefficient.
Effective coefficients are only formed where |S| >= 1e-6 max|S| (the mask).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .clifford import build_clifford
from .errors import DimensionError, PreconditionError
from .fields import (
    DiracConfig,
    GridSpec,
    MatrixPotential,
    SpinorField,
    apply_dirac,
    dbar,
    manufacture_from_field,
    partial,
    random_periodic_spinor,
)

MASK_RELATIVE_FLOOR = 1e-6
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class DbarSystem:
    grid: GridSpec
    U1: np.ndarray
    U2: np.ndarray
    V: MatrixPotential

    def __post_init__(self):
        if self.grid.n != 2:
            raise DimensionError("the dbar system lives in two dimensions")
        for name in ("U1", "U2"):
            a = np.asarray(getattr(self, name), dtype=complex)
            if a.shape != self.grid.shape:
                raise DimensionError(f"{name} has shape {a.shape}, grid is {self.grid.shape}")
            object.__setattr__(self, name, a)
        if self.V.grid != self.grid or self.V.N != 2:
            raise DimensionError("potential must be a 2x2 field on the same grid")

    @classmethod
    def from_fields(cls, u: SpinorField, V: MatrixPotential) -> "DbarSystem":
        if u.N != 2:
            raise DimensionError("need a two-component spinor")
        if V.grid != u.grid:
            raise DimensionError("spinor and potential live on different grids")
        return cls(u.grid, u.values[0], u.values[1], V)

    @property
    def spinor(self) -> SpinorField:
        return SpinorField(self.grid, np.array([self.U1, self.U2]))

    def v(self, i: int, j: int) -> np.ndarray:
        return self.V.entry(i, j)


@dataclass
class EffectiveScalar:
    """Reduced unknown S with coefficient W, valid on ``mask``.

    ``form`` records the convention: "i dbar S = W S" or "dbar S = W S".
    """

    S: np.ndarray
    W: np.ndarray
    mask: np.ndarray
    form: str
    residual: float
    w_sup: float
    bound: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    @property
    def mask_fraction(self) -> float:
        return float(self.mask.mean())

    def mask_fraction_in(self, grid: GridSpec, r_min: float, r_max: float) -> float:
        sel = (grid.radius >= r_min) & (grid.radius <= r_max)
        return float(self.mask[sel].mean()) if sel.any() else 0.0

    @property
    def bound_sup(self) -> float | None:
        return None if self.bound is None else float(self.bound[self.mask].max(initial=0.0))

    @property
    def bound_ok(self) -> bool:
        if self.bound is None:
            return True
        excess = np.abs(self.W[self.mask]) - self.bound[self.mask]
        return bool(np.all(excess <= 1e-12 * max(1.0, self.bound_sup)))

    def report(self) -> dict:
        out = {
            "form": self.form,
            "equation_residual": self.residual,
            "mask_fraction": self.mask_fraction,
            "W_sup_empirical": self.w_sup,
            "W_bound_sup": self.bound_sup,
            "W_within_bound": self.bound_ok,
        }
        out.update(self.extras)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.report(), **kwargs)


def _l2(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def _rel(res: np.ndarray, scale: float) -> float:
    num = _l2(res)
    if num == 0.0:
        return 0.0
    return num / scale if scale > 0 else np.inf


def system_terms(sys: DbarSystem) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise residuals r1 = i dbar U1 - (V21 U1 + V22 U2), r2 = i partial U2 - (V11 U1 + V12 U2)."""
    g = sys.grid
    r1 = 1j * dbar(g, sys.U1) - (sys.v(2, 1) * sys.U1 + sys.v(2, 2) * sys.U2)
    r2 = 1j * partial(g, sys.U2) - (sys.v(1, 1) * sys.U1 + sys.v(1, 2) * sys.U2)
    return r1, r2


def system_residual(sys: DbarSystem) -> tuple[float, float]:
    """Both equation residuals in L2, relative to the L2 norm of U.

    Since (D_2 + V) U = -(r2, r1), the root-sum-square of the two numbers
    equals ||(D_2 + V) U|| / ||U||; see :func:`equivalence_gap`.
    """
    r1, r2 = system_terms(sys)
    scale = np.sqrt(_l2(sys.U1) ** 2 + _l2(sys.U2) ** 2)
    return _rel(r1, scale), _rel(r2, scale)


def equivalence_gap(sys: DbarSystem) -> float:
    """Mismatch between the system residual and the Dirac residual.

    Relative to max(||(D+V)U||, ||DU|| + ||VU||).
    """
    r1, r2 = system_terms(sys)
    u = sys.spinor
    du = apply_dirac(DiracConfig(build_clifford(2)), u).values
    vu = sys.V.apply(u)
    dirac = du + vu
    a = np.sqrt(_l2(r1) ** 2 + _l2(r2) ** 2)
    b = _l2(dirac)
    pointwise = _l2(dirac + np.array([r2, r1]))
    # near a solution both residuals are rounding noise, so compare against
    # the size of the terms rather than against b itself
    scale = max(b, _l2(du) + _l2(vu))
    if scale == 0.0:
        return 0.0
    return float(max(abs(a - b), pointwise) / scale)


def _mask(S: np.ndarray) -> np.ndarray:
    mag = np.abs(S)
    top = mag.max()
    if top == 0:
        return np.zeros(S.shape, dtype=bool)
    return mag >= MASK_RELATIVE_FLOOR * top


def _scalar(S, W, mask, lhs, form, bound=None, extras=None) -> EffectiveScalar:
    """lhs is the derivative side already evaluated (i dbar S or dbar S)."""
    res = np.where(mask, lhs - W * S, 0.0)
    scale = _l2(np.where(mask, lhs, 0.0))
    residual = _rel(res, scale)
    w_sup = float(np.abs(W[mask]).max(initial=0.0))
    return EffectiveScalar(S, W, mask, form, residual, w_sup, bound, extras or {})


def case1_reduce(sys: DbarSystem) -> tuple[EffectiveScalar, EffectiveScalar]:
    """V11 = V22 = 0: each component solves its own first-order scalar equation.

    U1:        dbar U1 = w1 U1 with w1 = -i V21
    conj(U2):  dbar conj(U2) = w2 conj(U2) with w2 = conj(-i V12)
    """
    d11 = float(np.abs(sys.v(1, 1)).max())
    d22 = float(np.abs(sys.v(2, 2)).max())
    if max(d11, d22) >= SYMMETRY_TOL:
        raise PreconditionError(f"Case-1 needs V11 = V22 = 0; sup norms are {d11:.3e}, {d22:.3e}")
    g = sys.grid
    m1 = _mask(sys.U1)
    w1 = np.where(m1, -1j * (sys.v(2, 1) + sys.v(2, 2) * sys.U2 / np.where(m1, sys.U1, 1.0)), 0.0)
    s1 = _scalar(sys.U1, w1, m1, dbar(g, sys.U1), "dbar S = W S", extras={"component": 1})
    S2 = sys.U2.conj()
    m2 = _mask(S2)
    w2 = np.where(m2, np.conj(-1j * (sys.v(1, 2) + sys.v(1, 1) * sys.U1 / np.where(m2, sys.U2, 1.0))), 0.0)
    s2 = _scalar(S2, w2, m2, dbar(g, S2), "dbar S = W S", extras={"component": 2})
    for s in (s1, s2):
        s.extras["diagonal_sup"] = max(d11, d22)
    return s1, s2


def case2_symmetry(sys: DbarSystem) -> tuple[float, float]:
    """sup |V21 + conj(V12)| and sup |V22 + conj(V11)|."""
    a = float(np.abs(sys.v(2, 1) + sys.v(1, 2).conj()).max())
    b = float(np.abs(sys.v(2, 2) + sys.v(1, 1).conj()).max())
    return a, b


def case2_reduce(sys: DbarSystem) -> EffectiveScalar:
    """S = U1 + conj(U2) solves i dbar S = W S with W = V21 + V22 conj(S)/S."""
    sym = case2_symmetry(sys)
    if max(sym) >= SYMMETRY_TOL:
        raise PreconditionError(f"Case-2 symmetry violated: residuals {sym[0]:.3e}, {sym[1]:.3e}")
    S = sys.U1 + sys.U2.conj()
    mask = _mask(S)
    if not mask.any():
        raise PreconditionError("S vanishes identically; nothing to reduce")
    safe = np.where(mask, S, 1.0)
    v21, v22 = sys.v(2, 1), sys.v(2, 2)
    W = np.where(mask, v21 + v22 * safe.conj() / safe, 0.0)
    bound = np.abs(v21) + np.abs(v22)
    extras = {
        "symmetry_residuals": list(sym),
        "V21_sup_plus_V22_sup": float(np.abs(v21).max() + np.abs(v22).max()),
    }
    return _scalar(S, W, mask, 1j * dbar(sys.grid, S), "i dbar S = W S", bound, extras)


def majorana_bound(V: MatrixPotential) -> np.ndarray:
    v11, v12, v21, v22 = V.entry(1, 1), V.entry(1, 2), V.entry(2, 1), V.entry(2, 2)
    a = v11.conj() + v22 + 1j * (v21 - v12.conj())
    b = v11.conj() - v22 + 1j * (v21 + v12.conj())
    return 0.5 * (np.abs(a) + np.abs(b))


def majorana_reduce(U: SpinorField, V: MatrixPotential) -> EffectiveScalar:
    """Real U: F = U1 + i U2 solves dbar F = W F with

    W = -(conj V11 + V22 + i(V21 - conj V12))/2 - (conj V11 - V22 + i(V21 + conj V12))/2 * conj(F)/F.
    """
    if U.grid.n != 2 or U.N != 2:
        raise DimensionError("Majorana reduction needs a two-component field in 2D")
    imag = float(np.abs(U.values.imag).max())
    if imag >= SYMMETRY_TOL:
        raise PreconditionError(f"field is not real: max |Im U| = {imag:.3e}")
    u1, u2 = U.values.real
    F = u1 + 1j * u2
    G = u1 - 1j * u2
    conj_gap = float(np.abs(G - F.conj()).max())
    mask = _mask(F)
    if not mask.any():
        raise PreconditionError("F vanishes identically; nothing to reduce")
    v11, v12, v21, v22 = V.entry(1, 1), V.entry(1, 2), V.entry(2, 1), V.entry(2, 2)
    a = v11.conj() + v22 + 1j * (v21 - v12.conj())
    b = v11.conj() - v22 + 1j * (v21 + v12.conj())
    safe = np.where(mask, F, 1.0)
    W = np.where(mask, -0.5 * a - 0.5 * b * safe.conj() / safe, 0.0)
    extras = {"G_minus_conjF": conj_gap, "max_imag_U": imag}
    return _scalar(F, W, mask, dbar(U.grid, F), "dbar S = W S", majorana_bound(V), extras)


def reduction_report(result, sys: DbarSystem | None = None) -> dict:
    """JSON-ready summary of one or more reductions, with system residuals if given."""
    items = result if isinstance(result, (tuple, list)) else [result]
    out = {"reductions": [s.report() for s in items]}
    if sys is not None:
        r1, r2 = system_residual(sys)
        out["system_residuals"] = [r1, r2]
        out["equivalence_gap"] = equivalence_gap(sys)
    return out


# -- manufactured systems -------------------------------------------------------------


def _potential(grid: GridSpec, v11, v12, v21, v22) -> MatrixPotential:
    vals = np.array([[v11, v12], [v21, v22]], dtype=complex)
    return MatrixPotential.from_values(grid, vals)


def manufacture_general(grid: GridSpec, seed: int, **kw) -> DbarSystem:
    """Random nowhere-vanishing periodic U with its rank-one potential."""
    u = random_periodic_spinor(grid, 2, seed, **kw)
    V = manufacture_from_field(DiracConfig(build_clifford(2)), u)
    return DbarSystem.from_fields(u, V)


def manufacture_case1(grid: GridSpec, seed: int, **kw) -> DbarSystem:
    """V11 = V22 = 0, V21 = i dbar U1 / U1, V12 = i partial U2 / U2."""
    u = random_periodic_spinor(grid, 2, seed, **kw)
    u1, u2 = u.values
    zero = np.zeros(grid.shape)
    V = _potential(grid, zero, 1j * partial(grid, u2) / u2, 1j * dbar(grid, u1) / u1, zero)
    return DbarSystem(grid, u1, u2, V)


def manufacture_case2(grid: GridSpec, seed: int, dominance: float = 2.0, **kw) -> DbarSystem:
    """Potential with V21 = -conj(V12), V22 = -conj(V11) solving the system exactly.

    (V11, V12) = (a, b) solve  a U1 + b U2 = i partial U2  and
    a conj(U2) + b conj(U1) = i conj(dbar U1), which needs |U1| != |U2|;
    U1 is scaled by ``dominance`` to keep the determinant away from zero.
    """
    u = random_periodic_spinor(grid, 2, seed, **kw)
    u1, u2 = u.values
    u1 = u1 * dominance * np.abs(u2).max() / np.abs(u1).min()
    det = np.abs(u1) ** 2 - np.abs(u2) ** 2
    if det.min() <= 0:
        raise PreconditionError("|U1| must dominate |U2| everywhere")
    r1 = 1j * partial(grid, u2)
    r2 = 1j * np.conj(dbar(grid, u1))
    a = (u1.conj() * r1 - u2 * r2) / det
    b = (u1 * r2 - u2.conj() * r1) / det
    V = _potential(grid, a, b, -b.conj(), -a.conj())
    return DbarSystem(grid, u1, u2, V)


def manufacture_majorana(grid: GridSpec, seed: int, **kw) -> tuple[SpinorField, MatrixPotential]:
    """Real nowhere-vanishing U and the rank-one complex potential it solves with.

    A real potential cannot be manufactured this way in general: with U real,
    D_2 U has nonzero imaginary part unless U is independent of x.
    """
    rng = np.random.default_rng(seed)
    from .fields import random_trig_polynomial

    bw = kw.get("bandwidth", 2)
    amp = kw.get("amplitude", 0.5)
    vals = np.array([np.exp(random_trig_polynomial(grid, bw, rng, 6, amp).real) for _ in range(2)])
    u = SpinorField(grid, vals)
    return u, manufacture_from_field(DiracConfig(build_clifford(2)), u)


def dbar_kernel_projection(grid: GridSpec, u: np.ndarray) -> np.ndarray:
    """Keep only the Fourier modes annihilated by the discrete dbar.

    On the periodic box these are the constants (plus Nyquist modes whose
    derivative wavenumber is set to zero).
    """
    kx, ky = grid.wavevectors(derivative=True)
    symbol = 1j * kx - ky
    uh = np.fft.fft2(u)
    return np.fft.ifft2(np.where(symbol == 0, uh, 0.0))
