"""Spinor fields on periodic grids and their spectral calculus.

The box [-L, L)^n with M points per axis stands in for R^n.  Every test field
is kept well inside the box so the periodic wrap never touches its support.
First-derivative wavenumbers drop the Nyquist mode, which keeps the discrete
Dirac operator Hermitian and commuting with complex conjugation.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.fft as sfft
from scipy import ndimage

from .clifford import CliffordRep
from .errors import (
    DegenerateSolutionError,
    DimensionError,
    GeometryError,
    NonIntegrableWeightError,
    NotBandLimitedError,
    SupportError,
)

OVERFLOW_THRESHOLD = 1e300
DEGENERACY_FLOOR = 1e-8


def fft_workers() -> int:
    """Thread count for scipy.fft, from DIRACLAB_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("DIRACLAB_THREADS", "1")))
    except ValueError:
        return 1


def _fftn(a, axes):
    return sfft.fftn(a, axes=axes, workers=fft_workers())


def _ifftn(a, axes):
    return sfft.ifftn(a, axes=axes, workers=fft_workers())


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L, L)^n with M samples per axis."""

    n: int
    L: float
    M: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"grid dimension must be positive, got {self.n}")
        if self.L <= 0:
            raise GeometryError(f"half width must be positive, got {self.L}")
        if self.M < 16 or self.M & (self.M - 1):
            raise GeometryError(f"resolution must be a power of two >= 16, got {self.M}")

    @property
    def h(self) -> float:
        return 2 * self.L / self.M

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.M)

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.n), indexing="ij", sparse=True))

    @cached_property
    def radius(self) -> np.ndarray:
        r2 = sum(c**2 for c in self.coords)
        return np.sqrt(r2)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Angular wavenumbers (pi/L) * {-M/2, ..., M/2-1} in FFT order."""
        return 2 * np.pi * sfft.fftfreq(self.M, d=self.h)

    @cached_property
    def derivative_frequencies(self) -> np.ndarray:
        k = self.frequencies.copy()
        k[self.M // 2] = 0.0
        return k

    def wavevectors(self, derivative: bool = True) -> tuple[np.ndarray, ...]:
        k = self.derivative_frequencies if derivative else self.frequencies
        shapes = []
        for j in range(self.n):
            s = [1] * self.n
            s[j] = self.M
            shapes.append(k.reshape(s))
        return tuple(shapes)

    def to_index(self, points: np.ndarray) -> np.ndarray:
        """Physical points (K, n) -> fractional grid indices (n, K)."""
        return ((np.asarray(points, dtype=float) + self.L) / self.h).T


@dataclass(frozen=True)
class SpinorField:
    """N complex components sampled on ``grid``; values has shape (N, M, ..., M).

    ``support_hint`` = (r_min, r_max) declares the field vanishes outside that
    annulus (checked up to a 2h dilation).
    """

    grid: GridSpec
    values: np.ndarray
    support_hint: tuple[float, float] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape[1:] != self.grid.shape:
            raise DimensionError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)
        if self.support_hint is not None:
            r_min, r_max = self.support_hint
            r = self.grid.radius
            outside = (r < r_min - 2 * self.grid.h) | (r > r_max + 2 * self.grid.h)
            mag = np.sqrt(np.sum(np.abs(v) ** 2, axis=0))
            if np.any(mag[np.broadcast_to(outside, mag.shape)] >= 1e-12):
                raise SupportError(f"field does not vanish outside annulus {self.support_hint}")

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.grid.n

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean norm over the N components."""
        return np.sqrt(np.sum(self.values.real**2 + self.values.imag**2, axis=0))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))

    def scaled(self, c: complex) -> "SpinorField":
        return SpinorField(self.grid, c * self.values, self.support_hint)

    def spectrum(self) -> np.ndarray:
        return _fftn(self.values, axes=tuple(range(1, self.n + 1)))


@dataclass(frozen=True)
class MatrixPotential:
    """Sampled N x N potential; values has shape (N, N, M, ..., M)."""

    grid: GridSpec
    values: np.ndarray
    sup_norm: float
    decay_rate: float | None = None

    @classmethod
    def from_values(cls, grid: GridSpec, values: np.ndarray, decay_rate: float | None = None):
        values = np.asarray(values, dtype=complex)
        return cls(grid, values, float(operator_norms(values).max()), decay_rate)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    def apply(self, u: SpinorField) -> np.ndarray:
        return np.einsum("ab...,b...->a...", self.values, u.values)

    def entry(self, i: int, j: int) -> np.ndarray:
        """1-based entry V_ij as a scalar field."""
        return self.values[i - 1, j - 1]


def operator_norms(values: np.ndarray) -> np.ndarray:
    """Pointwise spectral norm of a (N, N, ...) matrix field."""
    N = values.shape[0]
    if N == 2:
        fro2 = np.sum(np.abs(values) ** 2, axis=(0, 1))
        det = values[0, 0] * values[1, 1] - values[0, 1] * values[1, 0]
        disc = np.sqrt(np.maximum(fro2**2 - 4 * np.abs(det) ** 2, 0.0))
        return np.sqrt((fro2 + disc) / 2)
    mats = np.moveaxis(values, (0, 1), (-2, -1))
    return np.linalg.norm(mats, ord=2, axis=(-2, -1))


@dataclass(frozen=True)
class DiracConfig:
    rep: CliffordRep
    mass: float = 0.0


def _check(cfg_or_rep, u: SpinorField) -> CliffordRep:
    rep = cfg_or_rep.rep if isinstance(cfg_or_rep, DiracConfig) else cfg_or_rep
    if rep.n != u.grid.n:
        raise DimensionError(f"representation is for n={rep.n}, grid has n={u.grid.n}")
    if rep.N != u.N:
        raise DimensionError(f"representation acts on N={rep.N}, field has {u.N} components")
    return rep


def _spatial_axes(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def _symbol_times(rep: CliffordRep, grid: GridSpec, uh: np.ndarray) -> np.ndarray:
    out = np.zeros_like(uh)
    for alpha, xi in zip(rep.alphas, grid.wavevectors()):
        out += np.einsum("ab,b...->a...", alpha, xi * uh)
    return out


def apply_dirac(cfg: DiracConfig, u: SpinorField) -> SpinorField:
    """(D_n + m beta) u with D_n = -i sum_j alpha_j d_j, evaluated spectrally."""
    rep = _check(cfg, u)
    axes = _spatial_axes(u.n)
    out = _ifftn(_symbol_times(rep, u.grid, _fftn(u.values, axes)), axes)
    if cfg.mass:
        out = out + cfg.mass * np.einsum("ab,b...->a...", rep.beta, u.values)
    return SpinorField(u.grid, out)


def dirac_spectrum(cfg: DiracConfig, u: SpinorField) -> np.ndarray:
    """Symbol-multiplied spectrum (alpha.xi + m beta) u_hat."""
    rep = _check(cfg, u)
    uh = u.spectrum()
    out = _symbol_times(rep, u.grid, uh)
    if cfg.mass:
        out = out + cfg.mass * np.einsum("ab,b...->a...", rep.beta, uh)
    return out


def apply_cz_multiplier(cfg: DiracConfig, k: int, f: SpinorField) -> SpinorField:
    """Multiplier M_k(xi) = i xi_k (alpha.xi)/|xi|^2 (1-based k), with M_k(0) = 0.

    Applied to f = D_n phi it returns d_k phi.  The mass in ``cfg`` is ignored.
    """
    rep = _check(cfg, f)
    if not 1 <= k <= rep.n:
        raise DimensionError(f"axis index k must be in 1..{rep.n}, got {k}")
    grid = f.grid
    axes = _spatial_axes(f.n)
    xis = grid.wavevectors()
    sq = sum(x**2 for x in xis)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(sq > 0, 1j * xis[k - 1] / np.where(sq > 0, sq, 1.0), 0.0)
    out = _symbol_times(rep, grid, _fftn(f.values, axes)) * scale
    return SpinorField(grid, _ifftn(out, axes))


def gradient(u: SpinorField) -> np.ndarray:
    """Spectral gradient, shape (n, N, M, ..., M)."""
    axes = _spatial_axes(u.n)
    uh = _fftn(u.values, axes)
    return np.array([_ifftn(1j * xi * uh, axes) for xi in u.grid.wavevectors()])


def laplacian(u: SpinorField) -> SpinorField:
    axes = _spatial_axes(u.n)
    sq = sum(x**2 for x in u.grid.wavevectors(derivative=False))
    return SpinorField(u.grid, _ifftn(-sq * _fftn(u.values, axes), axes))


def _scalar_derivative(grid: GridSpec, u: np.ndarray, symbol: Callable) -> np.ndarray:
    if grid.n != 2:
        raise DimensionError("d and dbar are only defined for n = 2")
    u = np.asarray(u, dtype=complex)
    if u.shape != grid.shape:
        raise DimensionError(f"scalar field shape {u.shape} does not match grid {grid.shape}")
    kx, ky = grid.wavevectors()
    return _ifftn(symbol(kx, ky) * _fftn(u, (0, 1)), (0, 1))


def dbar(grid: GridSpec, u: np.ndarray) -> np.ndarray:
    """d_x + i d_y (twice the Wirtinger d/dz-bar)."""
    return _scalar_derivative(grid, u, lambda kx, ky: 1j * kx - ky)


def partial(grid: GridSpec, u: np.ndarray) -> np.ndarray:
    """d_x - i d_y (twice the Wirtinger d/dz)."""
    return _scalar_derivative(grid, u, lambda kx, ky: 1j * kx + ky)


# -- regions and quadrature ---------------------------------------------------


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def mask(self, grid: GridSpec) -> np.ndarray:
        c = np.broadcast_to(np.asarray(self.center, dtype=float), (grid.n,))
        d2 = sum((x - cj) ** 2 for x, cj in zip(grid.coords, c))
        return d2 <= self.radius**2

    def fits(self, grid: GridSpec, margin: float = 0.0) -> bool:
        c = np.asarray(self.center, dtype=float)
        return bool(np.all(np.abs(c) + self.radius + margin <= grid.L))


@dataclass(frozen=True)
class Annulus:
    r_min: float
    r_max: float

    def mask(self, grid: GridSpec) -> np.ndarray:
        r = grid.radius
        return (r >= self.r_min) & (r <= self.r_max)


Weight = Callable[..., np.ndarray] | np.ndarray | float | None


def _weight_values(grid: GridSpec, weight: Weight) -> np.ndarray:
    if weight is None:
        return np.ones(grid.shape)
    if callable(weight):
        return np.broadcast_to(np.asarray(weight(*grid.coords), dtype=float), grid.shape)
    return np.broadcast_to(np.asarray(weight, dtype=float), grid.shape)


def weighted_norm(u: SpinorField | np.ndarray, weight: Weight = None, p: float = 2.0, region=None,
                  grid: GridSpec | None = None) -> float:
    """Midpoint-rule value of  integral_region weight * |u|^p  (no p-th root).

    ``u`` may be a SpinorField or a pointwise magnitude array (with ``grid``).
    ``weight`` is a callable of the coordinate arrays, an array, or None (= 1).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(u, SpinorField):
        grid = u.grid
        mag = u.magnitude()
    else:
        if grid is None:
            raise ValueError("grid is required when u is an array")
        mag = np.abs(np.asarray(u))
    w = _weight_values(grid, weight)
    sel = np.ones(grid.shape, dtype=bool) if region is None else region.mask(grid)
    support = sel & (mag > 0)
    if np.any(support):
        ws = w[support]
        if not np.all(np.isfinite(ws)) or ws.max() > OVERFLOW_THRESHOLD:
            raise NonIntegrableWeightError("weight exceeds the overflow threshold on the support")
    return float(np.sum(w[support] * mag[support] ** p) * grid.cell_volume)


def lp_norm(u: SpinorField | np.ndarray, p: float, region=None, grid: GridSpec | None = None) -> float:
    return weighted_norm(u, None, p, region, grid) ** (1.0 / p)


# -- interpolation ------------------------------------------------------------


class Interpolator:
    """Off-grid evaluation of a periodic field.

    ``spline`` uses prefiltered B-splines of the given order (periodic wrap);
    ``spectral`` evaluates the trigonometric interpolant exactly.
    """

    def __init__(self, grid: GridSpec, values: np.ndarray, method: str = "spline", order: int = 5):
        self.grid = grid
        vals = np.asarray(values)
        self.scalar = vals.ndim == grid.n
        self.values = vals[None] if self.scalar else vals
        self.method = method
        self.order = order
        if method == "spline":
            self._coeffs = []
            for comp in self.values:
                parts = [comp.real] + ([comp.imag] if np.iscomplexobj(comp) else [])
                self._coeffs.append([ndimage.spline_filter(p, order=order, mode="grid-wrap") for p in parts])
        elif method == "spectral":
            self._spec = _fftn(self.values, _spatial_axes(grid.n)) / grid.M**grid.n
        else:
            raise ValueError(f"unknown interpolation method {method!r}")

    def __call__(self, points: np.ndarray, chunk: int = 4096) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.grid.n:
            raise DimensionError(f"points must have {self.grid.n} coordinates")
        out = np.empty((self.values.shape[0], len(pts)), dtype=complex)
        for s in range(0, len(pts), chunk):
            out[:, s:s + chunk] = self._eval(pts[s:s + chunk])
        return out[0] if self.scalar else out

    def _eval(self, pts):
        if self.method == "spline":
            idx = self.grid.to_index(pts)
            res = []
            for parts in self._coeffs:
                vals = [ndimage.map_coordinates(p, idx, order=self.order, mode="grid-wrap", prefilter=False)
                        for p in parts]
                res.append(vals[0] + 1j * vals[1] if len(vals) == 2 else vals[0].astype(complex))
            return np.array(res)
        grid = self.grid
        M = grid.M
        k = grid.frequencies
        shifted = pts + grid.L
        res = []
        for spec in self._spec:
            t = spec
            for ax in range(grid.n - 1, -1, -1):
                e = np.exp(1j * np.outer(shifted[:, ax], k))
                # Nyquist split symmetrically so real data interpolate to real values
                e[:, M // 2] = np.cos(shifted[:, ax] * k[M // 2])
                if ax == grid.n - 1:
                    t = np.tensordot(e, t, axes=([1], [ax]))  # (K, M, ..., M)
                else:
                    t = np.einsum("pk,p...k->p...", e, t)
            res.append(t)
        return np.array(res)


# -- generators ----------------------------------------------------------------


def plane_wave(grid: GridSpec, wavevector, spinor) -> SpinorField:
    """exp(i xi.x) v for a real xi on the grid's frequency lattice."""
    xi = np.asarray(wavevector)
    if xi.shape != (grid.n,):
        raise DimensionError(f"wavevector must have {grid.n} components")
    if np.iscomplexobj(xi) and np.any(xi.imag != 0):
        raise NotBandLimitedError("complex wavevector gives an exponentially growing, non-periodic field")
    xi = xi.real.astype(float)
    idx = xi * grid.L / np.pi
    if np.any(np.abs(idx - np.round(idx)) > 1e-9) or np.any(np.abs(idx) >= grid.M // 2):
        raise NotBandLimitedError(f"wavevector {xi} is not a resolved lattice frequency of the grid")
    phase = np.exp(1j * sum(x * c for x, c in zip(xi, grid.coords)))
    v = np.asarray(spinor, dtype=complex)
    return SpinorField(grid, v.reshape((-1,) + (1,) * grid.n) * phase)


def constant_field(grid: GridSpec, spinor) -> SpinorField:
    v = np.asarray(spinor, dtype=complex)
    return SpinorField(grid, np.broadcast_to(v.reshape((-1,) + (1,) * grid.n), (len(v),) + grid.shape).copy())


def random_bandlimited(grid: GridSpec, N: int, bandwidth: int, seed: int) -> SpinorField:
    """Random spectrum restricted to integer frequencies |k_j| <= bandwidth."""
    if bandwidth >= grid.M // 2:
        raise NotBandLimitedError("bandwidth must stay below the Nyquist index")
    rng = np.random.default_rng(seed)
    idx = np.fft.fftfreq(grid.M, 1.0 / grid.M)
    keep = np.abs(idx) <= bandwidth
    mask = np.ones(grid.shape, dtype=bool)
    for j in range(grid.n):
        s = [1] * grid.n
        s[j] = grid.M
        mask = mask & keep.reshape(s)
    spec = (rng.normal(size=(N,) + grid.shape) + 1j * rng.normal(size=(N,) + grid.shape)) * mask
    vals = _ifftn(spec, _spatial_axes(grid.n))
    vals /= np.sqrt(np.mean(np.abs(vals) ** 2))
    return SpinorField(grid, vals)


def random_trig_polynomial(grid: GridSpec, bandwidth: int, rng: np.random.Generator, terms: int = 6,
                           amplitude: float = 1.0) -> np.ndarray:
    """Complex trigonometric polynomial with a few random lattice modes."""
    out = np.zeros(grid.shape, dtype=complex)
    scale = np.pi / grid.L
    for _ in range(terms):
        k = rng.integers(-bandwidth, bandwidth + 1, size=grid.n) * scale
        c = (rng.normal() + 1j * rng.normal()) * amplitude / np.sqrt(terms)
        phase = 1.0
        for kj, x in zip(k, grid.coords):
            phase = phase * np.exp(1j * kj * x)
        out += c * phase
    return out


def random_periodic_spinor(grid: GridSpec, N: int, seed: int, bandwidth: int = 2, amplitude: float = 0.5,
                           terms: int = 6) -> SpinorField:
    """Nowhere-vanishing smooth periodic spinor: components exp(P_a(x))."""
    rng = np.random.default_rng(seed)
    vals = np.array([np.exp(random_trig_polynomial(grid, bandwidth, rng, terms, amplitude)) for _ in range(N)])
    return SpinorField(grid, vals)


# -- manufactured solutions -----------------------------------------------------


@dataclass(frozen=True)
class DecayProfile:
    """Radial profile g(r) > 0 together with its logarithmic derivative g'/g."""

    name: str
    g: Callable[[np.ndarray], np.ndarray]
    dlog: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    @classmethod
    def exponential(cls, c: float, smoothing: float = 1.0) -> "DecayProfile":
        """exp(-c(sqrt(r^2+s^2) - s)): behaves like e^{-c r}, smooth at 0, g(0) = 1."""
        s = float(smoothing)
        if s == 0:
            return cls("exponential", lambda r: np.exp(-c * r), lambda r: -c * np.ones_like(r), {"c": c, "s": s})
        return cls(
            "exponential",
            lambda r: np.exp(-c * (np.sqrt(r**2 + s**2) - s)),
            lambda r: -c * r / np.sqrt(r**2 + s**2),
            {"c": c, "s": s},
        )

    @classmethod
    def gaussian(cls, c: float) -> "DecayProfile":
        return cls("gaussian", lambda r: np.exp(-c * r**2), lambda r: -2 * c * r, {"c": c})

    @classmethod
    def constant(cls) -> "DecayProfile":
        return cls("constant", lambda r: np.ones_like(r), lambda r: np.zeros_like(r), {})

    @classmethod
    def power_tail(cls, k: float, core: float = 1.0) -> "DecayProfile":
        """(1 + r^2/core^2)^{-k/2} ~ r^{-k} at infinity."""
        return cls(
            "power_tail",
            lambda r: (1 + (r / core) ** 2) ** (-k / 2),
            lambda r: -k * r / (core**2 + r**2),
            {"k": k, "core": core},
        )


def _unit_directions(grid: GridSpec) -> tuple[np.ndarray, ...]:
    r = grid.radius
    safe = np.where(r > 0, r, 1.0)
    return tuple(np.where(r > 0, c / safe, 0.0) for c in grid.coords)


def manufacture_from_field(cfg: DiracConfig, u: SpinorField, floor: float = DEGENERACY_FLOOR) -> MatrixPotential:
    """Rank-one V = -(D_m u) u^dagger / |u|^2 so that (D_m + V) u = 0 on the grid."""
    mag = u.magnitude()
    if mag.min() < floor:
        raise DegenerateSolutionError(f"min |U| = {mag.min():.3e} below {floor:g}; V would blow up")
    du = apply_dirac(cfg, u).values
    vals = -np.einsum("a...,b...->ab...", du, u.values.conj()) / mag**2
    return MatrixPotential(u.grid, vals, float((np.sqrt(np.sum(np.abs(du) ** 2, axis=0)) / mag).max()))


def manufacture_solution(profile: DecayProfile, rep: CliffordRep, grid: GridSpec, spinor=None,
                         method: str = "analytic", mass: float = 0.0):
    """U = g(|x|) v and the rank-one potential making (D_n + m beta + V) U = 0.

    ``analytic`` builds V = i (g'/g)(alpha.omega) P_v - m beta P_v from the
    profile's log-derivative, which stays bounded even where g underflows.
    ``spectral`` divides the FFT-computed D U by |U|^2 and therefore requires
    min |U| >= 1e-8.
    """
    if rep.n != grid.n:
        raise DimensionError(f"representation is for n={rep.n}, grid has n={grid.n}")
    v = np.zeros(rep.N, dtype=complex) if spinor is None else np.asarray(spinor, dtype=complex)
    if spinor is None:
        v[0] = 1.0
    v = v / np.linalg.norm(v)
    r = grid.radius
    g = profile.g(r)
    u = SpinorField(grid, v.reshape((-1,) + (1,) * grid.n) * g)
    cfg = DiracConfig(rep, mass)
    if method == "spectral":
        return u, manufacture_from_field(cfg, u)
    if method != "analytic":
        raise ValueError(f"unknown method {method!r}")
    proj = np.outer(v, v.conj())
    omega = _unit_directions(grid)
    dl = profile.dlog(r)
    vals = np.zeros((rep.N, rep.N) + grid.shape, dtype=complex)
    expand = (rep.N, rep.N) + (1,) * grid.n
    for alpha, w in zip(rep.alphas, omega):
        vals += (alpha @ proj).reshape(expand) * (1j * dl * w)
    if mass:
        vals -= mass * (rep.beta @ proj).reshape(expand)
    return u, MatrixPotential.from_values(grid, vals)


def solution_residual(cfg: DiracConfig, u: SpinorField, V: MatrixPotential) -> float:
    """||(D_m + V) u||_2 / ||u||_2."""
    res = apply_dirac(cfg, u).values + V.apply(u)
    norm = np.sqrt(np.sum(np.abs(u.values) ** 2))
    if norm == 0:
        return 0.0
    return float(np.sqrt(np.sum(np.abs(res) ** 2)) / norm)


# -- dumps ----------------------------------------------------------------------


def dump_field(u: SpinorField, path, fmt: str = "csv", spectrum: bool = False) -> None:
    """Write (index vector, N complex entries) rows as CSV, or an .npz archive."""
    vals = u.spectrum() if spectrum else u.values
    idx = np.indices(u.grid.shape).reshape(u.n, -1).T
    flat = vals.reshape(u.N, -1).T
    if fmt == "npz":
        np.savez(path, index=idx, values=flat, L=u.grid.L, M=u.grid.M, n=u.grid.n)
        return
    if fmt != "csv":
        raise ValueError(f"unknown dump format {fmt!r}")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"i{j}" for j in range(u.n)] + [f"{part}{a}" for a in range(u.N) for part in ("re", "im")])
        for i, row in zip(idx, flat):
            w.writerow(list(i) + [repr(float(x)) for z in row for x in (z.real, z.imag)])


def load_field_csv(path, grid: GridSpec) -> SpinorField:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    idx = data[:, : grid.n].astype(int)
    comp = data[:, grid.n:]
    N = comp.shape[1] // 2
    vals = np.zeros((N,) + grid.shape, dtype=complex)
    for a in range(N):
        vals[(a,) + tuple(idx.T)] = comp[:, 2 * a] + 1j * comp[:, 2 * a + 1]
    return SpinorField(grid, vals)
