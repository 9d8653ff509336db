"""Clifford representations for the n-dimensional Dirac operator.

The generators are built by the usual Pauli doubling so every entry lies in
{0, +-1, +-i}.  That lets the anticommutation relations be checked in exact
Gaussian-integer arithmetic before the matrices are handed to the spectral
code as complex128 arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SingularSymbolError

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)


def spinor_dimension(n: int) -> int:
    """N = 2**(n/2) for even n, 2**((n+1)/2) for odd n."""
    return 2 ** ((n + 1) // 2)


def _generators(k: int) -> list[np.ndarray]:
    # 2k+1 mutually anticommuting Hermitian involutions of size 2**k
    gens = list(PAULI)
    for _ in range(k - 1):
        eye = np.eye(gens[0].shape[0], dtype=complex)
        gens = [np.kron(SIGMA_1, g) for g in gens] + [np.kron(SIGMA_2, eye), np.kron(SIGMA_3, eye)]
    return gens


@dataclass(frozen=True)
class CliffordRep:
    """Hermitian matrices alpha_1..alpha_n and beta acting on C^N.

    ``exact`` marks representations whose entries are Gaussian integers, for
    which :func:`check_relations` can run without rounding.
    """

    n: int
    N: int
    alphas: tuple[np.ndarray, ...]
    beta: np.ndarray
    exact: bool = True
    _stack: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.alphas) != self.n:
            raise DimensionError(f"expected {self.n} alpha matrices, got {len(self.alphas)}")
        for a in (*self.alphas, self.beta):
            if a.shape != (self.N, self.N):
                raise DimensionError(f"matrix shape {a.shape} != ({self.N}, {self.N})")
            a.setflags(write=False)
        stack = np.array(self.alphas)
        stack.setflags(write=False)
        object.__setattr__(self, "_stack", stack)

    @property
    def alpha_stack(self) -> np.ndarray:
        """Array of shape (n, N, N)."""
        return self._stack

    def to_dict(self) -> dict:
        def enc(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in m]

        return {
            "n": self.n,
            "N": self.N,
            "alphas": [enc(a) for a in self.alphas],
            "beta": enc(self.beta),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "CliffordRep":
        def dec(m):
            arr = np.array(m, dtype=float)
            return arr[..., 0] + 1j * arr[..., 1]

        alphas = tuple(dec(a) for a in d["alphas"])
        beta = dec(d["beta"])
        exact = all(_is_gaussian_integer(m) for m in (*alphas, beta))
        return cls(int(d["n"]), int(d["N"]), alphas, beta, exact=exact)

    @classmethod
    def from_json(cls, text: str) -> "CliffordRep":
        return cls.from_dict(json.loads(text))


def build_clifford(n: int) -> CliffordRep:
    """Return a Clifford representation for spatial dimension ``n >= 2``.

    n = 2 gives (sigma_1, sigma_2) with beta = sigma_3; n = 3 gives the block
    matrices [[0, sigma_j], [sigma_j, 0]] with beta = diag(I, -I).
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise DimensionError(f"Clifford representation needs integer n >= 2, got {n!r}")
    n = int(n)
    N = spinor_dimension(n)
    k = N.bit_length() - 1
    gens = _generators(k)
    return CliffordRep(n, N, tuple(g.copy() for g in gens[:n]), gens[-1].copy())


def conjugate_rep(rep: CliffordRep, unitary: np.ndarray) -> CliffordRep:
    """Unitarily equivalent representation Q alpha_j Q^dagger."""
    q = np.asarray(unitary, dtype=complex)
    qh = q.conj().T
    alphas = tuple(q @ a @ qh for a in rep.alphas)
    beta = q @ rep.beta @ qh
    return CliffordRep(rep.n, rep.N, alphas, beta, exact=all(_is_gaussian_integer(m) for m in (*alphas, beta)))


def random_unitary(N: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _is_gaussian_integer(m: np.ndarray) -> bool:
    return bool(np.all(m.real == np.round(m.real)) and np.all(m.imag == np.round(m.imag)))


def _gauss(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.round(m.real).astype(np.int64), np.round(m.imag).astype(np.int64)


def _gauss_mul(a, b):
    (ar, ai), (br, bi) = a, b
    return ar @ br - ai @ bi, ar @ bi + ai @ br


@dataclass
class RelationReport:
    n: int
    N: int
    exact: bool
    anticommutator_error: float
    hermitian_error: float
    beta_anticommutator_error: float
    beta_square_error: float
    dimension_ok: bool

    @property
    def max_error(self) -> float:
        return max(
            self.anticommutator_error,
            self.hermitian_error,
            self.beta_anticommutator_error,
            self.beta_square_error,
        )

    @property
    def passed(self) -> bool:
        tol = 0.0 if self.exact else 1e-13
        return self.dimension_ok and self.max_error <= tol


def check_relations(rep: CliffordRep, exact: bool | None = None) -> RelationReport:
    """Max-entry deviations of every Clifford relation.

    With ``exact`` (default when the rep is Gaussian-integer valued) products
    are formed in int64 arithmetic, so a passing report means zero error.
    """
    if exact is None:
        exact = rep.exact
    N = rep.N
    if exact:
        if not rep.exact:
            raise ValueError("representation has non-integer entries; exact check unavailable")
        eye = (np.eye(N, dtype=np.int64), np.zeros((N, N), dtype=np.int64))
        mats = [_gauss(a) for a in rep.alphas]
        beta = _gauss(rep.beta)

        def mul(a, b):
            return _gauss_mul(a, b)

        def add(a, b, s=1):
            return a[0] + s * b[0], a[1] + s * b[1]

        def err(x):
            return float(max(np.abs(x[0]).max(), np.abs(x[1]).max()))

        def adjoint(a):
            return a[0].T, -a[1].T

        def scaled(a, c):
            return c * a[0], c * a[1]
    else:
        eye = np.eye(N, dtype=complex)
        mats = list(rep.alphas)
        beta = rep.beta

        def mul(a, b):
            return a @ b

        def add(a, b, s=1):
            return a + s * b

        def err(x):
            return float(np.abs(x).max())

        def adjoint(a):
            return a.conj().T

        def scaled(a, c):
            return c * a

    anti = 0.0
    for j, aj in enumerate(mats):
        for k, ak in enumerate(mats):
            target = scaled(eye, 2 if j == k else 0)
            anti = max(anti, err(add(add(mul(aj, ak), mul(ak, aj)), target, -1)))
    herm = max((err(add(a, adjoint(a), -1)) for a in mats), default=0.0)
    beta_anti = max((err(add(mul(a, beta), mul(beta, a))) for a in mats), default=0.0)
    beta_sq = err(add(mul(beta, beta), eye, -1))
    beta_herm = err(add(beta, adjoint(beta), -1))
    return RelationReport(
        n=rep.n,
        N=N,
        exact=exact,
        anticommutator_error=anti,
        hermitian_error=max(herm, beta_herm),
        beta_anticommutator_error=beta_anti,
        beta_square_error=beta_sq,
        dimension_ok=N == spinor_dimension(rep.n),
    )


def dirac_symbol(rep: CliffordRep, xi) -> np.ndarray:
    """alpha . xi.  Broadcasts: xi of shape (..., n) gives (..., N, N)."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != rep.n:
        raise DimensionError(f"xi has {xi.shape[-1]} components, rep has n={rep.n}")
    return np.tensordot(xi, rep.alpha_stack, axes=([-1], [0]))


def invert_symbol(rep: CliffordRep, xi) -> np.ndarray:
    """(alpha . xi)^{-1} = (alpha . xi) / |xi|^2 for xi != 0."""
    xi = np.asarray(xi, dtype=float)
    sq = np.sum(xi**2, axis=-1)
    if np.any(sq == 0):
        raise SingularSymbolError("Dirac symbol is singular at xi = 0")
    return dirac_symbol(rep, xi) / sq[..., None, None]
