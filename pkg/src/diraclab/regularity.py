"""Ratio checks for the elliptic estimates of the Dirac operator.

* global CZ:   ||grad phi||_p  <=  C ||D phi||_p   for compactly supported phi
* local W1p:   ||psi||_{W^{1,p}(B_R)}  <=  C (1 + |m| + ||V||_inf + 1/R) ||psi||_{L^p(B_2R)}
               for solutions of (D + m beta + V) psi = 0
* Hoelder:     sampled [psi]_{C^{0,alpha}} on a ball, alpha = 1 - n/p

W^{1,p} norms use the sum convention ||psi||_p + ||grad psi||_p.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import qmc

from .clifford import CliffordRep, build_clifford
from .errors import GeometryError, PreconditionError
from .fields import (
    Ball,
    DecayProfile,
    DiracConfig,
    GridSpec,
    Interpolator,
    MatrixPotential,
    SpinorField,
    apply_dirac,
    gradient,
    lp_norm,
    manufacture_solution,
    solution_residual,
)
from .landis import ball_points

RESIDUAL_TOL = 1e-8
SMOOTHSTEP_SLOPE = 15.0 / 8.0  # max of d/dt (10t^3 - 15t^4 + 6t^5)


def _grad_magnitude(u: SpinorField) -> np.ndarray:
    g = gradient(u)
    return np.sqrt(np.sum(g.real**2 + g.imag**2, axis=(0, 1)))


# -- global Calderon-Zygmund ---------------------------------------------------


def cz_ratio(rep: CliffordRep, spec, p: float) -> float:
    """||grad phi||_p / ||D phi||_p for a TestFunctionSpec (or a ready SpinorField).

    |grad phi| is the Frobenius norm over directions and components.
    """
    if not 1 < p < math.inf:
        raise ValueError(f"need 1 < p < inf, got {p}")
    phi = spec if isinstance(spec, SpinorField) else spec.realize(rep)
    den = lp_norm(apply_dirac(DiracConfig(rep), phi), p)
    if den == 0:
        raise PreconditionError("D phi vanishes identically; phi is in the discrete kernel")
    return lp_norm(_grad_magnitude(phi), p, grid=phi.grid) / den


# -- local W^{1,p} -------------------------------------------------------------


@dataclass
class RegularityReport:
    p: float
    R: float
    lhs: float
    rhs_factor: float
    rhs_norm: float
    ratio: float
    n: int = 2
    m: float = 0.0
    supV: float = 0.0
    x0: tuple = ()
    residual: float = 0.0
    holder_alpha: float | None = None
    holder_seminorm: float | None = None
    tag: str = ""

    def __post_init__(self):
        if min(self.lhs, self.rhs_norm) < 0:
            raise ValueError("norms must be nonnegative")
        if self.holder_alpha is not None and not 0 < self.holder_alpha < 1:
            raise ValueError("holder_alpha must lie in (0, 1)")

    @property
    def rhs(self) -> float:
        return self.rhs_factor * self.rhs_norm


class LocalEstimate:
    """Per-solution cache: residual check, |psi| and |grad psi| are computed once."""

    def __init__(self, psi: SpinorField, V: MatrixPotential, m: float, rep: CliffordRep | None = None,
                 residual_tol: float = RESIDUAL_TOL):
        self.psi, self.V, self.m = psi, V, m
        self.grid = psi.grid
        self.rep = rep or build_clifford(self.grid.n)
        self.residual = solution_residual(DiracConfig(self.rep, m), psi, V)
        if not self.residual < residual_tol:
            raise PreconditionError(
                f"psi is not a solution: relative residual {self.residual:.2e} >= {residual_tol:g}")
        self.mag = psi.magnitude()
        self.grad_mag = _grad_magnitude(psi)

    def report(self, x0, R: float, p: float, holder_pairs: int = 0, tag: str = "") -> RegularityReport:
        grid = self.grid
        if R <= 0 or not 1 <= p < math.inf:
            raise ValueError("need R > 0 and 1 <= p < inf")
        x0 = tuple(float(c) for c in np.broadcast_to(np.asarray(x0, dtype=float), (grid.n,)))
        if not Ball(x0, 2 * R).fits(grid):
            raise GeometryError(f"B_{2 * R}({x0}) leaves the box [-{grid.L}, {grid.L})^{grid.n}")
        inner = Ball(x0, R)
        lhs = lp_norm(self.mag, p, inner, grid) + lp_norm(self.grad_mag, p, inner, grid)
        rhs_norm = lp_norm(self.mag, p, Ball(x0, 2 * R), grid)
        factor = 1 + abs(self.m) + self.V.sup_norm + 1 / R
        ratio = lhs / (factor * rhs_norm) if rhs_norm > 0 else 0.0
        alpha = semi = None
        if p > grid.n:
            alpha = 1 - grid.n / p
            if holder_pairs:
                semi = holder_seminorm(self.psi, inner, alpha, holder_pairs)
        return RegularityReport(p, R, lhs, factor, rhs_norm, ratio, grid.n, self.m, self.V.sup_norm, x0,
                                self.residual, alpha, semi, tag)


def local_w1p_ratio(psi: SpinorField, V: MatrixPotential, m: float, x0, R: float, p: float,
                    rep: CliffordRep | None = None, residual_tol: float = RESIDUAL_TOL,
                    holder_pairs: int = 0, tag: str = "") -> RegularityReport:
    """Both sides of the local W^{1,p} estimate on B_R(x0) / B_2R(x0).

    ``psi`` must solve (D + m beta + V) psi = 0 to ``residual_tol`` relative.
    With ``holder_pairs`` > 0 and p > n the sampled Hoelder seminorm of
    exponent 1 - n/p on B_R(x0) is attached as well.
    """
    return LocalEstimate(psi, V, m, rep, residual_tol).report(x0, R, p, holder_pairs, tag)


@dataclass
class ManufacturedCase:
    psi: SpinorField
    V: MatrixPotential
    m: float
    params: dict


def manufactured_family(count: int, seed: int, grid: GridSpec | None = None,
                        c_range=(1.5, 3.0), s_range=(0.75, 2.0), m_range=(0.0, 2.0)) -> list[ManufacturedCase]:
    """Radial e^{-c r}-type solutions with random spinor direction and mass (n = 2).

    (c, s, m) come from a Latin hypercube, so every family covers each
    stratum of every range once; the family sup of the ratio is driven by the
    smallest mass and would otherwise jump between seeds.  The analytic
    rank-one potential keeps ||V||_inf <= c + m.  Defaults are sized so the
    spectral residual stays near round-off on L = 16, M = 512.
    """
    grid = grid or GridSpec(2, 16.0, 512)
    rep = build_clifford(grid.n)
    rng = np.random.default_rng(seed)
    lo, hi = np.array([c_range, s_range, m_range], dtype=float).T
    params = qmc.scale(qmc.LatinHypercube(d=3, seed=rng).random(count), lo, hi) if count else []
    out = []
    for i in range(count):
        c, s, m = (float(x) for x in params[i])
        v = rng.normal(size=rep.N) + 1j * rng.normal(size=rep.N)
        psi, V = manufacture_solution(DecayProfile.exponential(c, s), rep, grid, v, mass=m)
        out.append(ManufacturedCase(psi, V, m, {"seed": seed, "index": i, "c": c, "s": s, "m": m}))
    return out


def w1p_sweep(cases, ps=(2.0, 4.0), radii=(1.0, 2.0, 4.0), centers=None) -> list[RegularityReport]:
    """All (case, p, R, x0) combinations; centers default to the 3x3 grid {-1,0,1}^2."""
    if centers is None:
        centers = [(a, b) for a in (-1.0, 0.0, 1.0) for b in (-1.0, 0.0, 1.0)]
    reports = []
    for case in cases:
        tag = f"seed={case.params.get('seed')};index={case.params.get('index')}"
        est = LocalEstimate(case.psi, case.V, case.m)
        for p in ps:
            for R in radii:
                for x0 in centers:
                    reports.append(est.report(x0, R, p, tag=tag))
    return reports


def empirical_constants(reports) -> dict:
    ratios = np.array([r.ratio for r in reports])
    by_p = {}
    for r in reports:
        by_p[repr(r.p)] = max(by_p.get(repr(r.p), 0.0), r.ratio)
    return {"count": len(reports), "constant": float(ratios.max()), "min_ratio": float(ratios.min()),
            "constant_by_p": by_p}


CSV_FIELDS = ("n", "p", "R", "m", "supV", "lhs", "rhs", "ratio")


def reports_to_csv(reports, path=None, header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        for line in header_comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS + ("x0", "tag"))
    for r in reports:
        w.writerow([r.n, repr(r.p), repr(r.R), repr(r.m), repr(r.supV), repr(r.lhs), repr(r.rhs),
                    repr(r.ratio), " ".join(repr(c) for c in r.x0), r.tag])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def summary_json(reports, extra: dict | None = None) -> str:
    data = {"w1p": empirical_constants(reports), "norm_convention": "W1p = Lp + Lp(grad)"}
    if extra:
        data.update(extra)
    return json.dumps(data, indent=2, sort_keys=True)


# -- Hoelder -----------------------------------------------------------------


def pair_points(n: int, pairs: int) -> tuple[np.ndarray, int]:
    """Center plus quasi-uniform ball points, enough to enumerate ``pairs`` pairs.

    Pairs are ordered (1,0), (2,0), (2,1), (3,0), ... so that every prefix of
    the enumeration is a subset of any longer one.
    """
    K = int(math.ceil((1 + math.sqrt(1 + 8 * pairs)) / 2))
    pts = np.vstack([np.zeros((1, n)), ball_points(n, K - 1)])
    return pts, K


def holder_seminorm(psi: SpinorField, region: Ball, alpha: float, pairs: int = 20000,
                    method: str = "spline") -> float:
    """max |psi(x) - psi(y)| / |x - y|^alpha over sampled pairs in ``region``.

    This is a lower estimate of the true seminorm.  The sample set always
    contains the ball center and points on its boundary.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if pairs < 1000:
        raise ValueError("pairs must be at least 1000")
    grid = psi.grid
    if not region.fits(grid, margin=8 * grid.h):
        raise GeometryError("region is too close to the box edge for interpolation")
    unit, K = pair_points(grid.n, pairs)
    pts = np.asarray(region.center, dtype=float) + region.radius * unit
    vals = Interpolator(grid, psi.values, method)(pts).T  # (K, N)
    best = 0.0
    left = pairs
    for i in range(1, K):
        j = min(i, left)
        d = np.linalg.norm(vals[:j] - vals[i], axis=1)
        dist = np.linalg.norm(pts[:j] - pts[i], axis=1)
        best = max(best, float(np.max(d / dist**alpha)))
        left -= j
        if left <= 0:
            break
    return best


def radial_holder_oracle(f, R: float, alpha: float, samples: int = 4001) -> float:
    """Seminorm of x -> f(|x|) on B_R(0) for increasing f, from pairs on a diameter.

    Points on one ray give |x - y| = |a - b|, the smallest distance for the
    radii (a, b); the opposite ray is included for pairs straddling 0.
    """
    r = np.linspace(0.0, R, samples)
    fr = f(r)
    a, b = np.meshgrid(r, r, indexing="ij")
    fa, fb = np.meshgrid(fr, fr, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        same = np.abs(fa - fb) / np.abs(a - b) ** alpha
        opposite = np.abs(fa - fb) / (a + b) ** alpha
    return float(max(np.nanmax(np.where(a != b, same, 0)), np.nanmax(np.where(a + b > 0, opposite, 0))))


# -- cutoffs -----------------------------------------------------------------


def smoothstep(t):
    """Quintic smoothstep: 0 for t <= 0, 1 for t >= 1, C^2 in between."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10 - 15 * t + 6 * t**2)


def smoothstep_derivative(t):
    t = np.asarray(t, dtype=float)
    inside = (t > 0) & (t < 1)
    return np.where(inside, 30 * t**2 * (1 - t) ** 2, 0.0)


@dataclass
class Cutoff:
    kind: str
    center: tuple
    R: float
    values: np.ndarray
    grad: np.ndarray  # |grad| (or |d/dy| on the line)
    bound: np.ndarray  # stated pointwise bound for |grad|
    constant: float
    meta: dict

    def bound_ok(self) -> bool:
        return bool(np.all(self.grad <= self.bound * (1 + 1e-12)))

    def as_dict(self) -> dict:
        d = asdict(self)
        for k in ("values", "grad", "bound"):
            d.pop(k)
        d["max_grad"] = float(self.grad.max())
        d["bound_ok"] = self.bound_ok()
        return d


def build_cutoff(center, R: float, kind: str, grid: GridSpec | None = None, y=None) -> Cutoff:
    """Smooth cutoffs built from the quintic smoothstep (max slope 15/8).

    ``eta``:  1 on B_R(center), 0 outside B_2R(center); |grad| <= (15/8)/R.
    ``rho``:  annulus cutoff with r0 = R: 1 on r0/3 <= |x - c| <= 3, 0 for
              |x - c| <= r0/4 or >= 4; |grad| <= (15/8) 12/r0 inside, 15/8 outside.
    ``eta_line``: on the y-line, 1 on (-log R, log R), 0 outside
              (-2 log R, 2 log R); |eta'| <= (15/8)/log R.  Pass ``y``.
    """
    if kind == "eta_line":
        if R <= 1:
            raise GeometryError("eta_line needs R > 1 so that log R > 0")
        lr = math.log(R)
        if y is None:
            y = np.linspace(-2.5 * lr, 2.5 * lr, 20001)
        y = np.asarray(y, dtype=float)
        t = (np.abs(y) - lr) / lr
        vals = 1 - smoothstep(t)
        grad = smoothstep_derivative(t) / lr
        return Cutoff(kind, (0.0,), R, vals, grad, np.full(y.shape, SMOOTHSTEP_SLOPE / lr),
                      SMOOTHSTEP_SLOPE, {"log_R": lr, "y_range": [float(y[0]), float(y[-1])]})
    if grid is None:
        raise ValueError(f"kind {kind!r} needs a grid")
    c = np.broadcast_to(np.asarray(center, dtype=float), (grid.n,))
    r = np.sqrt(sum((x - cj) ** 2 for x, cj in zip(grid.coords, c)))
    if kind == "eta":
        if R <= 0:
            raise GeometryError("eta needs R > 0")
        if not Ball(tuple(c), 2 * R).fits(grid):
            raise GeometryError("B_2R(center) leaves the box")
        t = (r - R) / R
        vals = 1 - smoothstep(t)
        grad = smoothstep_derivative(t) / R
        return Cutoff(kind, tuple(c.tolist()), R, vals, grad, np.full(r.shape, SMOOTHSTEP_SLOPE / R),
                      SMOOTHSTEP_SLOPE, {})
    if kind == "rho":
        r0 = R
        if not 0 < r0 < 9:
            raise GeometryError("rho needs 0 < r0 < 9 so that r0/3 < 3")
        if not Ball(tuple(c), 4.0).fits(grid):
            raise GeometryError("B_4(center) leaves the box")
        w_in = r0 / 3 - r0 / 4
        t_in = (r - r0 / 4) / w_in
        t_out = r - 3.0
        vals = smoothstep(t_in) * (1 - smoothstep(t_out))
        grad = smoothstep_derivative(t_in) / w_in + smoothstep_derivative(t_out)
        bound = np.where(r < r0 / 3, SMOOTHSTEP_SLOPE / w_in, SMOOTHSTEP_SLOPE)
        return Cutoff(kind, tuple(c.tolist()), R, vals, grad, bound, SMOOTHSTEP_SLOPE,
                      {"r0": r0, "inner": [r0 / 4, r0 / 3], "outer": [3.0, 4.0]})
    raise ValueError(f"unknown cutoff kind {kind!r}")
