"""Numerical checks of weighted (Carleman) inequalities for the Dirac operator.

A trial realizes a smooth spinor supported in an annulus, applies the
spectral Dirac operator once, and then compares

    lhs = tau * int drift(|x|) e^{tau b(|x|)} |u|^2
    rhs = int e^{tau b(|x|)} |D u|^2

for any number of weights.  The inequality holds when rhs / lhs >= 1.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .clifford import CliffordRep
from .errors import GeometryError, NonIntegrableWeightError, ParameterOutOfRangeError, SupportError
from .fields import DiracConfig, GridSpec, SpinorField, apply_dirac

EPS_DISC = 1e-3
EXP_LIMIT = 700.0

VARIANTS = ("LogSquared", "PowerLaw", "LogOnePlusPower", "OneDExp")


@dataclass(frozen=True)
class CarlemanWeight:
    """Tagged weight family.

    LogSquared(tau):        e^{tau (log r)^2}
    PowerLaw(a, tau):       e^{tau r^a}
    LogOnePlusPower(a, tau): e^{tau log(1 + r^a)}
    OneDExp(nu):            e^{2 nu y} on a line
    """

    variant: str
    tau: float = 0.0
    a: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown weight variant {self.variant!r}")
        needed = {
            "LogSquared": ("tau",),
            "PowerLaw": ("a", "tau"),
            "LogOnePlusPower": ("a", "tau"),
            "OneDExp": ("nu",),
        }[self.variant]
        for name in needed:
            if not getattr(self, name) > 0:
                raise ValueError(f"{self.variant} needs {name} > 0, got {getattr(self, name)}")

    @classmethod
    def log_squared(cls, tau: float) -> "CarlemanWeight":
        return cls("LogSquared", tau=float(tau))

    @classmethod
    def power_law(cls, a: float, tau: float) -> "CarlemanWeight":
        return cls("PowerLaw", tau=float(tau), a=float(a))

    @classmethod
    def log_one_plus_power(cls, a: float, tau: float) -> "CarlemanWeight":
        return cls("LogOnePlusPower", tau=float(tau), a=float(a))

    @classmethod
    def one_d_exp(cls, nu: float) -> "CarlemanWeight":
        return cls("OneDExp", nu=float(nu))

    @property
    def params(self) -> dict:
        if self.variant == "LogSquared":
            return {"tau": self.tau}
        if self.variant == "OneDExp":
            return {"nu": self.nu}
        return {"a": self.a, "tau": self.tau}

    def label(self) -> str:
        return ";".join(f"{k}={v!r}" for k, v in self.params.items())

    def exponent(self, r: np.ndarray) -> np.ndarray:
        """b(r), so the weight is exp(tau * b(r))."""
        r = np.asarray(r, dtype=float)
        if self.variant == "LogSquared":
            return np.log(r) ** 2
        if self.variant == "PowerLaw":
            return r**self.a
        if self.variant == "LogOnePlusPower":
            return np.log1p(r**self.a)
        raise ValueError("OneDExp is a weight on the line, not a radial weight")

    def log_weight(self, r: np.ndarray) -> np.ndarray:
        return self.tau * self.exponent(r)


def drift_coefficient(weight: CarlemanWeight, r) -> np.ndarray | float:
    """(b'' + b'/r)(r), the radial Laplacian of the exponent b.

    For LogSquared this is 2/r^2; the log-squared inequality itself is stated
    with 1/r^2, see :func:`verify_carleman_logsq`.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("drift coefficient is defined only for r > 0")
    a = weight.a
    if weight.variant == "LogSquared":
        out = 2.0 / r_arr**2
    elif weight.variant == "PowerLaw":
        out = a * a * r_arr ** (a - 2)
    elif weight.variant == "LogOnePlusPower":
        out = a * a * r_arr ** (a - 2) / (1 + r_arr**a) ** 2
    else:
        raise ValueError("OneDExp has no radial drift coefficient")
    return float(out) if np.ndim(r) == 0 else out


# -- test functions -------------------------------------------------------------


def smooth_bump(t: np.ndarray, order: float = 1.0) -> np.ndarray:
    """exp(order * (1 - 1/(1 - t^2))) on |t| < 1, zero elsewhere; peak value 1."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(order * (1.0 - 1.0 / (1.0 - ti * ti)))
    return out


def smooth_bump_derivative(t: np.ndarray, order: float = 1.0) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    s = 1.0 - ti * ti
    out[inside] = np.exp(order * (1.0 - 1.0 / s)) * order * (-2.0 * ti / (s * s))
    return out


@dataclass(frozen=True)
class TestFunctionSpec:
    """Recipe for a C^inf spinor supported in the annulus r_min < |x| < r_max.

    u(x) = bump((|x| - r_c)/w)  *  sum_j v_j exp(i k_j . x)

    with k_j random lattice wavevectors of the box (integer multiples of
    pi/L, at most ``bandwidth`` per axis) and v_j complex Gaussian spinors,
    all drawn from ``seed``.  The same spec realized at different M gives
    the same continuous function.
    """

    __test__ = False  # not a pytest class

    r_min: float
    r_max: float
    order: float = 1.0
    bandwidth: int = 8
    seed: int = 0
    L: float = 4.0
    M: int = 512
    terms: int = 6
    amplitude: float = 1.0

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max < self.L:
            raise GeometryError(f"need 0 < r_min < r_max < L, got ({self.r_min}, {self.r_max}, L={self.L})")
        if self.order <= 0:
            raise ValueError("bump order must be positive")
        if self.terms < 1:
            raise ValueError("need at least one Fourier term")

    def with_resolution(self, M: int) -> "TestFunctionSpec":
        return replace(self, M=M)

    def with_seed(self, seed: int) -> "TestFunctionSpec":
        return replace(self, seed=seed)

    def validate(self, n: int) -> GridSpec:
        grid = GridSpec(n, self.L, self.M)
        if self.r_max > self.L - 4 * grid.h:
            raise SupportError(f"r_max={self.r_max} is closer than 4h to the box edge (L={self.L}, h={grid.h})")
        if (self.r_max - self.r_min) < 8 * grid.h:
            raise GeometryError("annulus is too thin to resolve the bump on this grid")
        if self.bandwidth > self.M // 8:
            raise GeometryError(f"bandwidth {self.bandwidth} exceeds M/8 = {self.M // 8}")
        return grid

    def modes(self, n: int, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Wavevectors (terms, n) and spinor coefficients (terms, N)."""
        rng = np.random.default_rng(self.seed)
        ints = rng.integers(-self.bandwidth, self.bandwidth + 1, size=(self.terms, n))
        coef = rng.normal(size=(self.terms, N)) + 1j * rng.normal(size=(self.terms, N))
        coef *= self.amplitude / np.sqrt(2 * self.terms)
        return ints * (np.pi / self.L), coef

    def realize(self, rep: CliffordRep) -> SpinorField:
        grid = self.validate(rep.n)
        k, coef = self.modes(rep.n, rep.N)
        rc = 0.5 * (self.r_min + self.r_max)
        w = 0.5 * (self.r_max - self.r_min)
        bump = smooth_bump((grid.radius - rc) / w, self.order)
        vals = np.zeros((rep.N,) + grid.shape, dtype=complex)
        for kj, cj in zip(k, coef):
            phase = 1.0
            for kx, x in zip(kj, grid.coords):
                phase = phase * np.exp(1j * kx * x)
            vals += cj.reshape((rep.N,) + (1,) * rep.n) * (bump * phase)
        return SpinorField(grid, vals, support_hint=(self.r_min, self.r_max))

    def evaluate(self, rep: CliffordRep, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Closed-form u and grad u at points (K, n): shapes (K, N) and (K, n, N)."""
        pts = np.asarray(points, dtype=float)
        k, coef = self.modes(rep.n, rep.N)
        rc = 0.5 * (self.r_min + self.r_max)
        w = 0.5 * (self.r_max - self.r_min)
        r = np.linalg.norm(pts, axis=1)
        t = (r - rc) / w
        b = smooth_bump(t, self.order)
        db = smooth_bump_derivative(t, self.order) / w
        phases = np.exp(1j * pts @ k.T)  # (K, terms)
        poly = phases @ coef  # (K, N)
        dpoly = np.einsum("pj,jn,jN->pnN", phases, 1j * k, coef)
        unit = pts / np.where(r > 0, r, 1.0)[:, None]
        u = b[:, None] * poly
        grad = (db[:, None] * unit)[:, :, None] * poly[:, None, :] + b[:, None, None] * dpoly
        return u, grad


def random_specs(count: int, seed: int, L: float = 4.0, M: int = 512, r_lo: float = 0.1,
                 min_width: float = 0.5, max_bandwidth: int | None = None, terms: int = 6) -> list[TestFunctionSpec]:
    """Reproducible family of specs with random annuli, bump orders and bandwidths."""
    rng = np.random.default_rng(seed)
    h = 2 * L / M
    r_hi = L - 8 * h
    cap = M // 8 if max_bandwidth is None else max_bandwidth
    out = []
    for _ in range(count):
        r_min = rng.uniform(r_lo, r_hi - min_width)
        r_max = rng.uniform(r_min + min_width, r_hi)
        out.append(
            TestFunctionSpec(
                r_min=float(r_min),
                r_max=float(r_max),
                order=float(rng.choice([0.5, 1.0, 2.0])),
                bandwidth=int(rng.integers(1, cap + 1)),
                seed=int(rng.integers(2**31)),
                L=L,
                M=M,
                terms=terms,
            )
        )
    return out


# -- reports ----------------------------------------------------------------------


@dataclass
class CarlemanReport:
    weight: CarlemanWeight
    lhs: float
    rhs: float
    ratio: float
    seed: int | None = None
    M: int | None = None
    r_min: float | None = None
    r_max: float | None = None
    verdict: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.verdict:
            self.verdict = classify(self.ratio)

    @property
    def slack(self) -> float:
        return max(0.0, 1.0 - self.ratio) if math.isfinite(self.ratio) else math.nan

    @property
    def ok(self) -> bool:
        return self.verdict.startswith("pass")


def classify(ratio: float, eps: float = EPS_DISC) -> str:
    if not math.isfinite(ratio):
        return "fail"
    if ratio >= 1.0:
        return "pass"
    if ratio >= 1.0 - eps:
        return "pass (discretization)"
    return "fail"


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0 and rhs == 0.0:
        return 1.0
    if lhs == 0.0:
        return math.inf
    return rhs / lhs


@dataclass
class _Trial:
    """|u|^2, |Du|^2 and r restricted to the support annulus."""

    r: np.ndarray
    u2: np.ndarray
    du2: np.ndarray
    dv: float
    seed: int | None
    M: int
    annulus: tuple[float, float]


def _prepare(rep: CliffordRep, source) -> _Trial:
    if isinstance(source, TestFunctionSpec):
        u = source.realize(rep)
        seed = source.seed
    elif isinstance(source, SpinorField):
        u = source
        seed = None
        if u.support_hint is None:
            raise SupportError("field needs a support_hint annulus")
    else:
        raise TypeError(f"expected TestFunctionSpec or SpinorField, got {type(source).__name__}")
    grid = u.grid
    du = apply_dirac(DiracConfig(rep), u)
    r_min, r_max = u.support_hint
    r = grid.radius
    mask = (r >= max(r_min - 2 * grid.h, 0.5 * r_min)) & (r <= r_max + 2 * grid.h)
    u2 = np.sum(np.abs(u.values[:, mask]) ** 2, axis=0)
    du2 = np.sum(np.abs(du.values[:, mask]) ** 2, axis=0)
    return _Trial(r[mask], u2, du2, grid.cell_volume, seed, grid.M, (r_min, r_max))


def _evaluate(trial: _Trial, weight: CarlemanWeight, logsq_form: bool = True) -> CarlemanReport:
    meta = dict(seed=trial.seed, M=trial.M, r_min=trial.annulus[0], r_max=trial.annulus[1])
    try:
        logw = weight.log_weight(trial.r)
        if logw.size and logw.max() > EXP_LIMIT:
            raise ParameterOutOfRangeError(
                f"tau*b(r) reaches {logw.max():.1f} > {EXP_LIMIT} on the annulus; weight leaves double range"
            )
        wt = np.exp(logw)
        if weight.variant == "LogSquared" and logsq_form:
            drift = 1.0 / trial.r**2
        else:
            drift = drift_coefficient(weight, trial.r)
        lhs = float(weight.tau * np.sum(drift * wt * trial.u2) * trial.dv)
        rhs = float(np.sum(wt * trial.du2) * trial.dv)
    except (ParameterOutOfRangeError, NonIntegrableWeightError) as exc:
        return CarlemanReport(weight, math.nan, math.nan, math.nan, verdict="error: parameter-out-of-range",
                              meta={"message": str(exc)}, **meta)
    return CarlemanReport(weight, lhs, rhs, _ratio(lhs, rhs), **meta)


def verify_carleman_logsq(rep: CliffordRep, spec: TestFunctionSpec | SpinorField, tau: float) -> CarlemanReport:
    """tau int e^{tau (log r)^2} r^-2 |u|^2  versus  int e^{tau (log r)^2} |D u|^2."""
    return _evaluate(_prepare(rep, spec), CarlemanWeight.log_squared(tau))


def verify_carleman_general(rep: CliffordRep, spec: TestFunctionSpec | SpinorField,
                            weight: CarlemanWeight) -> CarlemanReport:
    """Radial weight e^{tau b(r)} with drift (b'' + b'/r) on the left side."""
    if weight.variant not in ("PowerLaw", "LogOnePlusPower"):
        raise ValueError(f"general verifier takes PowerLaw or LogOnePlusPower, got {weight.variant}")
    return _evaluate(_prepare(rep, spec), weight)


def verify_many(rep: CliffordRep, spec: TestFunctionSpec | SpinorField, weights) -> list[CarlemanReport]:
    """All radial weights on one realized trial (the FFT work is shared)."""
    trial = _prepare(rep, spec)
    return [_evaluate(trial, w) for w in weights]


def verify_carleman_1d(phi, nu: float, y=None, dphi=None, L: float | None = None) -> CarlemanReport:
    """nu^2 int e^{2 nu y} phi^2  versus  int e^{2 nu y} phi'^2 on a periodic line.

    ``phi`` is either a callable of y or samples on ``y`` (uniform, periodic,
    starting at -L).  The derivative is spectral unless ``dphi`` is given.
    """
    weight = CarlemanWeight.one_d_exp(nu)
    if callable(phi):
        if y is None:
            L = 4.0 if L is None else L
            y = -L + 2 * L * np.arange(4096) / 4096
        vals = np.asarray(phi(y), dtype=float)
    else:
        vals = np.asarray(phi, dtype=float)
        if y is None:
            raise ValueError("sampled phi needs its y grid")
    y = np.asarray(y, dtype=float)
    h = y[1] - y[0]
    M = y.size
    edge = np.concatenate([vals[:4], vals[-4:]])
    if np.any(np.abs(edge) >= 1e-12):
        raise SupportError("phi must vanish within 4 samples of the interval ends")
    if dphi is None:
        k = 2 * np.pi * np.fft.fftfreq(M, d=h)
        if M % 2 == 0:
            k[M // 2] = 0.0
        d = np.fft.ifft(1j * k * np.fft.fft(vals)).real
    else:
        d = np.asarray(dphi(y) if callable(dphi) else dphi, dtype=float)
    if 2 * nu * np.abs(y).max() > EXP_LIMIT:
        raise ParameterOutOfRangeError("e^{2 nu y} leaves double range on this interval")
    wt = np.exp(2 * nu * y)
    lhs = float(nu * nu * np.sum(wt * vals**2) * h)
    rhs = float(np.sum(wt * d**2) * h)
    return CarlemanReport(weight, lhs, rhs, _ratio(lhs, rhs), M=M, r_min=float(y[0]), r_max=float(y[-1] + h),
                          verdict=classify(_ratio(lhs, rhs), 1e-6))


def random_bump_1d(rng: np.random.Generator, y: np.ndarray, span: float = 1.5, terms: int = 4) -> np.ndarray:
    """Real bump with random support inside (-span, span) times a random cosine series."""
    a, b = np.sort(rng.uniform(-span, span, size=2))
    if b - a < 0.2:
        b = min(a + 0.2, span)
        a = b - 0.2
    c, w = 0.5 * (a + b), 0.5 * (b - a)
    env = smooth_bump((y - c) / w, rng.choice([0.5, 1.0, 2.0]))
    series = np.ones_like(y) * rng.normal()
    for j in range(1, terms + 1):
        series += rng.normal() * np.cos(j * np.pi * (y - a) / (b - a) + rng.uniform(0, 2 * np.pi)) / j
    return env * series


# -- sweeps -------------------------------------------------------------------------


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("DIRACLAB_THREADS", "1")))
    except ValueError:
        return 1


def sweep(weights: list, specs: list, trials: int = 1, rep: CliffordRep | None = None,
          workers: int | None = None) -> list[CarlemanReport]:
    """Every weight on ``trials`` reseeded copies of every spec.

    Copy t of a spec uses seed spec.seed + t.  Results come back in
    (spec, trial, weight) order regardless of thread scheduling, and a trial
    that raises produces error reports instead of stopping the sweep.
    """
    if not weights or not specs or trials < 1:
        return []
    if rep is None:
        from .clifford import build_clifford

        rep = build_clifford(2)
    jobs = [s.with_seed(s.seed + t) for s in specs for t in range(trials)]

    def run(spec):
        try:
            trial = _prepare(rep, spec)
        except Exception as exc:  # aggregate, never abort
            return [
                CarlemanReport(w, math.nan, math.nan, math.nan, seed=spec.seed, M=spec.M, r_min=spec.r_min,
                               r_max=spec.r_max, verdict=f"error: {type(exc).__name__}", meta={"message": str(exc)})
                for w in weights
            ]
        out = []
        for w in weights:
            try:
                if w.variant == "OneDExp":
                    raise ValueError("OneDExp weights belong to the 1D verifier")
                out.append(_evaluate(trial, w))
            except Exception as exc:
                out.append(CarlemanReport(w, math.nan, math.nan, math.nan, seed=spec.seed, M=spec.M,
                                          r_min=spec.r_min, r_max=spec.r_max,
                                          verdict=f"error: {type(exc).__name__}", meta={"message": str(exc)}))
        return out

    workers = workers or _default_workers()
    if workers == 1:
        chunks = [run(s) for s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, jobs))
    return [r for chunk in chunks for r in chunk]


def summarize(reports: list[CarlemanReport]) -> dict:
    """Min ratio per weight label plus verdict counts."""
    by_weight: dict[str, float] = {}
    counts: dict[str, int] = {}
    for r in reports:
        key = f"{r.weight.variant}({r.weight.label()})"
        if math.isfinite(r.ratio):
            by_weight[key] = min(by_weight.get(key, math.inf), r.ratio)
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    finite = [r.ratio for r in reports if math.isfinite(r.ratio)]
    return {
        "reports": len(reports),
        "min_ratio": min(finite) if finite else None,
        "min_ratio_by_weight": by_weight,
        "verdicts": counts,
        "all_pass": all(r.ok for r in reports),
    }


CSV_FIELDS = ("weight_variant", "params", "seed", "M", "r_min", "r_max", "lhs", "rhs", "ratio", "verdict")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def reports_to_csv(reports: list[CarlemanReport], path=None, header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        for line in header_comment.splitlines():
            buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        writer.writerow([r.weight.variant, r.weight.label(), _fmt(r.seed), _fmt(r.M), _fmt(r.r_min),
                         _fmt(r.r_max), _fmt(r.lhs), _fmt(r.rhs), _fmt(r.ratio), r.verdict])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


# -- independent quadrature oracle ---------------------------------------------------


def polar_oracle(rep: CliffordRep, spec: TestFunctionSpec, weight: CarlemanWeight, n_r: int = 400,
                 n_theta: int = 2048) -> tuple[float, float]:
    """(lhs, rhs) in 2D from Gauss-Legendre in r and the trapezoid rule in theta.

    Uses the closed-form gradient of the test function, so it shares nothing
    with the FFT pipeline.
    """
    if rep.n != 2:
        raise ValueError("polar oracle is two-dimensional")
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = spec.r_min + (x + 1) * 0.5 * (spec.r_max - spec.r_min)
    wr = wx * 0.5 * (spec.r_max - spec.r_min)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    R, T = np.meshgrid(r, th, indexing="ij")
    pts = np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], axis=1)
    u, grad = spec.evaluate(rep, pts)
    du = -1j * np.einsum("jab,pjb->pa", rep.alpha_stack, grad)
    u2 = np.sum(np.abs(u) ** 2, axis=1).reshape(R.shape)
    du2 = np.sum(np.abs(du) ** 2, axis=1).reshape(R.shape)
    wt = np.exp(weight.log_weight(R))
    drift = 1.0 / R**2 if weight.variant == "LogSquared" else drift_coefficient(weight, R)
    area = (wr[:, None] * R) * (2 * np.pi / n_theta)
    lhs = weight.tau * float(np.sum(area * drift * wt * u2))
    rhs = float(np.sum(area * wt * du2))
    return lhs, rhs
