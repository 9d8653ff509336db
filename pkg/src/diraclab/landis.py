"""Vanishing order at infinity and decay-envelope fits.

    M_R[U] = inf_{|x| = R} sup_{B_1(x)} |U|

is estimated from deterministic, nested low-discrepancy point sets: refining
the sphere sampling can only lower the estimate, and refining the ball
sampling can only raise it.  Envelopes are of the form exp(-kappa R^p (log R)^q).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import GeometryError
from .fields import Interpolator, SpinorField, fft_workers

# -- point sets -------------------------------------------------------------------------------


def van_der_corput(count: int, base: int = 2) -> np.ndarray:
    """First ``count`` points of the base-b radical inverse sequence in [0, 1)."""
    out = np.zeros(count)
    for i in range(count):
        x, f, k = 0.0, 1.0 / base, i
        while k:
            x += f * (k % base)
            k //= base
            f /= base
        out[i] = x
    return out


def _halton(count: int, dim: int) -> np.ndarray:
    # unscrambled so the first k points are the same for every count >= k
    return qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]


def sphere_points(n: int, count: int) -> np.ndarray:
    """Nested quasi-uniform directions on S^{n-1}, shape (count, n)."""
    if n == 2:
        t = 2 * np.pi * van_der_corput(count)
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    z = ndtri(_halton(count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def ball_points(n: int, count: int) -> np.ndarray:
    """Nested quasi-uniform points of the closed unit ball, shape (count, n).

    A quarter of the points sit on the boundary sphere (where the sup of a
    decaying field lives); the rest fill the interior.
    """
    # every 4th point (starting at 0) is on the boundary, so prefixes nest
    is_bdry = np.arange(count) % 4 == 0
    n_bdry = int(is_bdry.sum())
    n_int = count - n_bdry
    bdry = sphere_points(n, n_bdry)
    if n_int <= 0:
        return bdry
    if n == 2:
        u = _halton(n_int, 2)
        r = np.sqrt(u[:, 0])
        t = 2 * np.pi * u[:, 1]
        inner = np.stack([r * np.cos(t), r * np.sin(t)], axis=1)
    else:
        u = _halton(n_int, n + 1)
        z = ndtri(u[:, :n])
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        inner = z * u[:, n:] ** (1.0 / n)
    out = np.empty((count, n))
    out[is_bdry] = bdry
    out[~is_bdry] = inner
    return out


# -- M_R -------------------------------------------------------------------------------------


class VanishingOrder:
    """Reusable M_R evaluator for one field (the spline prefilter is done once)."""

    def __init__(self, u: SpinorField, method: str = "spline", ball_radius: float = 1.0, scale: float = 1.0):
        self.u = u
        self.grid = u.grid
        self.ball_radius = ball_radius
        self.scale = scale
        self._interp = Interpolator(u.grid, u.values, method)

    def max_radius(self) -> float:
        return self.grid.L - self.ball_radius - 8 * self.grid.h

    def __call__(self, R: float, sphere_samples: int = 256, ball_samples: int = 512) -> float:
        if sphere_samples < 64:
            raise ValueError("sphere_samples must be at least 64")
        if R <= 0 or R > self.max_radius():
            raise GeometryError(
                f"R={R} needs R + {self.ball_radius} <= L - 8h = {self.grid.L - 8 * self.grid.h:.3f}"
            )
        n = self.grid.n
        centers = R * sphere_points(n, sphere_samples)
        offsets = self.ball_radius * ball_points(n, ball_samples)
        pts = (centers[:, None, :] + offsets[None, :, :]).reshape(-1, n)
        vals = self._interp(pts)  # (N, K)
        mag = np.sqrt(np.sum(vals.real**2 + vals.imag**2, axis=0)).reshape(sphere_samples, ball_samples)
        return float(self.scale * mag.max(axis=1).min())


def compute_MR(u: SpinorField, R: float, sphere_samples: int = 256, ball_samples: int = 512,
               method: str = "spline") -> float:
    """inf over sampled |x| = R of max |U| over sampled points of the closed ball B_1(x)."""
    return VanishingOrder(u, method)(R, sphere_samples, ball_samples)


# -- curves and fits -------------------------------------------------------------------------


@dataclass
class EnvelopeFit:
    kappa: float
    p: float
    q: float
    log_prefactor: float
    residual: float
    max_residual: float

    def log_envelope(self, R) -> np.ndarray:
        R = np.asarray(R, dtype=float)
        return self.log_prefactor - self.kappa * _basis(R, self.p, self.q)


@dataclass
class VanishingCurve:
    R: np.ndarray
    MR: np.ndarray
    ball_radius: float = 1.0
    sup_norm: float | None = None
    fit: EnvelopeFit | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        self.MR = np.asarray(self.MR, dtype=float)
        if self.R.shape != self.MR.shape or self.R.ndim != 1:
            raise ValueError("R and M_R must be matching 1D arrays")
        if np.any(np.diff(self.R) <= 0):
            raise ValueError("R ladder must be strictly increasing")
        if np.any(self.MR < 0):
            raise ValueError("M_R must be nonnegative")
        if self.sup_norm is not None and np.any(self.MR > self.sup_norm * (1 + 1e-9)):
            raise ValueError("M_R exceeds the sup norm of the field")

    def to_dat(self, path=None) -> str:
        text = "".join(f"{r!r} {m!r}\n" for r, m in zip(self.R.tolist(), self.MR.tolist()))
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def vanishing_curve(u: SpinorField, ladder, sphere_samples: int = 256, ball_samples: int = 512,
                    normalize: bool = True, method: str = "spline", workers: int | None = None) -> VanishingCurve:
    """M_R along a ladder, after rescaling so that |U(0)| = 1.

    Rungs are independent and run on ``workers`` threads (DIRACLAB_THREADS by default).
    """
    scale = 1.0
    if normalize:
        idx = (slice(None),) + tuple([u.grid.M // 2] * u.grid.n)
        u0 = float(np.linalg.norm(u.values[idx]))
        if u0 == 0:
            raise ValueError("|U(0)| = 0; cannot normalize")
        scale = 1.0 / u0
    vo = VanishingOrder(u, method, scale=scale)
    ladder = np.asarray(ladder, dtype=float)
    workers = workers or fft_workers()
    with ThreadPoolExecutor(max_workers=workers) as ex:
        mr = np.array(list(ex.map(lambda R: vo(R, sphere_samples, ball_samples), ladder)))
    sup = float(u.magnitude().max() * scale)
    meta = {"sphere_samples": sphere_samples, "ball_samples": ball_samples, "normalized": normalize,
            "L": u.grid.L, "M": u.grid.M, "h": u.grid.h}
    # interpolation can overshoot grid values by a hair
    return VanishingCurve(ladder, mr, 1.0, max(sup, float(mr.max(initial=0.0))), meta=meta)


def _basis(R: np.ndarray, p: float, q: float) -> np.ndarray:
    return R**p * np.log(R) ** q if q else R**p


def fit_envelope(curve: VanishingCurve, p: float, q: float, intercept: bool = True) -> EnvelopeFit:
    """Least squares for log M_R = a - kappa R^p (log R)^q.

    With ``intercept=False`` the prefactor a is pinned to 0.  The residual is
    the RMS of the log misfit; max_residual its largest absolute value.
    """
    pos = curve.MR > 0
    if pos.sum() < 5:
        raise ValueError("need at least 5 samples with M_R > 0")
    R = curve.R[pos]
    y = np.log(curve.MR[pos])
    x = _basis(R, p, q)
    if intercept:
        A = np.stack([np.ones_like(x), -x], axis=1)
        (a, kappa), *_ = np.linalg.lstsq(A, y, rcond=None)
    else:
        a = 0.0
        kappa = -float(np.dot(x, y) / np.dot(x, x))
    res = y - (a - kappa * x)
    fit = EnvelopeFit(float(kappa), p, q, float(a), float(np.sqrt(np.mean(res**2))), float(np.abs(res).max()))
    curve.fit = fit
    return fit


@dataclass
class BoundCheck:
    R: np.ndarray
    MR: np.ndarray
    bound: np.ndarray
    verdicts: list

    @property
    def passed(self) -> bool:
        return all(self.verdicts)

    def to_csv(self, path=None, header_comment: str | None = None) -> str:
        buf = io.StringIO()
        if header_comment:
            for line in header_comment.splitlines():
                buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["R", "M_R", "bound", "verdict"])
        for r, m, b, v in zip(self.R.tolist(), self.MR.tolist(), self.bound.tolist(), self.verdicts):
            w.writerow([repr(r), repr(m), repr(b), "pass" if v else "fail"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def check_lower_bound(curve: VanishingCurve, kappa: float, p: float, q: float, c: float,
                      r_min: float | None = None) -> BoundCheck:
    """verdict(R) = [M_R >= c exp(-kappa R^p (log R)^q)] for each ladder R >= r_min."""
    if kappa <= 0 or c <= 0:
        raise ValueError("kappa and c must be positive")
    sel = np.ones(curve.R.shape, dtype=bool) if r_min is None else curve.R >= r_min
    R = curve.R[sel]
    mr = curve.MR[sel]
    bound = c * np.exp(-kappa * _basis(R, p, q))
    # M_R = 0 fails even where the bound underflows to 0
    verdicts = [bool(m > 0 and m >= b) for m, b in zip(mr, bound)]
    return BoundCheck(R, mr, bound, verdicts)


def check_own_envelope(curve: VanishingCurve, fit: EnvelopeFit) -> BoundCheck:
    """Curve against its fitted envelope lowered by the largest misfit."""
    c = math.exp(fit.log_prefactor - fit.max_residual) * (1 - 1e-12)
    return check_lower_bound(curve, fit.kappa, fit.p, fit.q, c)


def fit_report(curve: VanishingCurve, fits: list[EnvelopeFit], extra: dict | None = None) -> str:
    data = {
        "R": curve.R.tolist(),
        "M_R": curve.MR.tolist(),
        "fits": [f.__dict__ for f in fits],
        "meta": curve.meta,
    }
    if extra:
        data.update(extra)
    return json.dumps(data, indent=2, sort_keys=True)
