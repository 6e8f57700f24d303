"""Weyl/Pauli operator algebra and characteristic functions.

Phase points (p, q) in Z_d^n x Z_d^n are addressed by a pair of integers
(p_index, q_index), each the base-d encoding of its vector with the first
subsystem as the most significant digit. Characteristic-function tables are
``(d**n, d**n)`` complex arrays indexed ``[p_index, q_index]``; flattening
them gives the lexicographic, p-major ordering used in serialized output.

For odd prime d the Weyl operators are ``w(p, q) = chi(-2^{-1} p.q) Z^p X^q``;
for d = 2 they are the Hermitian ``w(p, q) = i^{-p.q} Z^p X^q`` where p.q is
the integer dot product of the 0/1 vectors.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionCapError, NonPhysicalError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_MAX_DIM = 2**14
_config = {"max_dim": DEFAULT_MAX_DIM}

UNITARY_TOL = 1e-12
PARSEVAL_TOL = 1e-10


def set_max_dim(value: int) -> None:
    """Override the dense-matrix dimension cap (default 2**14)."""
    if value < 1:
        raise ValueError("max_dim must be positive")
    _config["max_dim"] = int(value)


def get_max_dim() -> int:
    return _config["max_dim"]


def check_dim(dim: int, max_dim: int | None = None) -> None:
    cap = get_max_dim() if max_dim is None else max_dim
    if dim > cap:
        raise DimensionCapError(f"dimension {dim} exceeds cap {cap}")


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    return all(d % k for k in range(2, int(d**0.5) + 1))


def check_prime(d: int) -> None:
    if not is_prime(d):
        raise ValidationError(f"local dimension d={d} must be 2 or an odd prime")


def half(d: int) -> int:
    """Inverse of 2 in Z_d for odd d."""
    if d == 2:
        raise ValueError("2 has no inverse mod 2")
    return pow(2, -1, d)


def num_subsystems(dim: int, d: int) -> int:
    n, rest = 0, dim
    while rest > 1:
        if rest % d:
            raise ValidationError(f"dimension {dim} is not a power of d={d}")
        rest //= d
        n += 1
    return n


@lru_cache(maxsize=None)
def digits(d: int, n: int) -> np.ndarray:
    """All vectors of Z_d^n as rows, ordered by their base-d index."""
    idx = np.arange(d**n)
    out = np.empty((d**n, n), dtype=np.int64)
    for i in range(n):
        out[:, i] = (idx // d ** (n - 1 - i)) % d
    out.flags.writeable = False
    return out


def vec_index(vec, d: int) -> int:
    out = 0
    for v in vec:
        out = out * d + int(v) % d
    return out


def _indices(vecs: np.ndarray, d: int) -> np.ndarray:
    n = vecs.shape[-1]
    weights = d ** np.arange(n - 1, -1, -1)
    return (np.mod(vecs, d) * weights).sum(axis=-1)


@lru_cache(maxsize=None)
def add_table(d: int, n: int) -> np.ndarray:
    """``add_table(d, n)[a, b]`` is the index of x_a + x_b."""
    dig = digits(d, n)
    out = _indices(dig[:, None, :] + dig[None, :, :], d)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def sub_table(d: int, n: int) -> np.ndarray:
    """``sub_table(d, n)[a, b]`` is the index of x_a - x_b."""
    dig = digits(d, n)
    out = _indices(dig[:, None, :] - dig[None, :, :], d)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def neg_index(d: int, n: int) -> np.ndarray:
    out = _indices(-digits(d, n), d)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def scale_index(d: int, n: int, factor: int) -> np.ndarray:
    """Index of ``factor * x`` for every x."""
    out = _indices(factor * digits(d, n), d)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def dot_table(d: int, n: int) -> np.ndarray:
    """Integer (unreduced) dot products p.q for every index pair."""
    dig = digits(d, n)
    out = dig @ dig.T
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def weyl_phase_table(d: int, n: int) -> np.ndarray:
    """Scalar c(p, q) with w(p, q) = c(p, q) Z^p X^q."""
    dots = dot_table(d, n)
    if d == 2:
        out = (1j) ** (-(dots % 4))
    else:
        out = np.exp(2j * np.pi * ((-half(d) * dots) % d) / d)
    out = np.asarray(out, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class PhasePoint:
    """A label (p, q) in Z_d^n x Z_d^n addressing one Weyl operator."""

    p: tuple
    q: tuple
    d: int = 2

    def __post_init__(self):
        check_prime(self.d)
        p = tuple(int(v) for v in self.p)
        q = tuple(int(v) for v in self.q)
        if len(p) != len(q):
            raise ValidationError("p and q must have equal length")
        if any(not 0 <= v < self.d for v in p + q):
            raise ValidationError(f"entries must lie in [0, {self.d})")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def index(self) -> tuple[int, int]:
        return vec_index(self.p, self.d), vec_index(self.q, self.d)

    @classmethod
    def from_index(cls, d: int, n: int, p_index: int, q_index: int) -> "PhasePoint":
        dig = digits(d, n)
        return cls(tuple(dig[p_index]), tuple(dig[q_index]), d)

    @classmethod
    def zero(cls, d: int, n: int) -> "PhasePoint":
        return cls((0,) * n, (0,) * n, d)

    def _check_compatible(self, other: "PhasePoint") -> None:
        if self.d != other.d or self.n != other.n:
            raise ValidationError("phase points live in different (d, n) systems")

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        self._check_compatible(other)
        d = self.d
        return PhasePoint(
            tuple((a + b) % d for a, b in zip(self.p, other.p)),
            tuple((a + b) % d for a, b in zip(self.q, other.q)),
            d,
        )

    def __neg__(self) -> "PhasePoint":
        d = self.d
        return PhasePoint(tuple(-a % d for a in self.p), tuple(-a % d for a in self.q), d)


def _shift_clock(d: int) -> tuple[np.ndarray, np.ndarray]:
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return X.astype(complex), Z


def weyl_matrix(label: PhasePoint, max_dim: int | None = None) -> np.ndarray:
    """Dense matrix of w(p, q) as the tensor product of single-site Weyl operators."""
    d, n = label.d, label.n
    check_dim(d**n, max_dim)
    X, Z = _shift_clock(d)
    out = np.ones((1, 1), dtype=complex)
    for p, q in zip(label.p, label.q):
        base = np.linalg.matrix_power(Z, p) @ np.linalg.matrix_power(X, q)
        if d == 2:
            phase = (1j) ** (-(p * q))
        else:
            phase = np.exp(2j * np.pi * ((-half(d) * p * q) % d) / d)
        out = np.kron(out, phase * base)
    return out


def symplectic_form(a: PhasePoint, b: PhasePoint) -> int:
    """sum_i (p_i q'_i - q_i p'_i) mod d."""
    a._check_compatible(b)
    val = sum(pa * qb - qa * pb for pa, qa, pb, qb in zip(a.p, a.q, b.p, b.q))
    return val % a.d


def weyl_compose(a: PhasePoint, b: PhasePoint) -> tuple[complex, PhasePoint]:
    """Return (phase, label) with w(a) w(b) = phase * w(label)."""
    a._check_compatible(b)
    d = a.d
    label = a + b
    # Z^p X^q Z^p' X^q' = omega^{-q.p'} Z^{p+p'} X^{q+q'}; labels are reduced mod d,
    # so for d = 2 the i^{<a,b>_s} shortcut fails when p + p' or q + q' wraps.
    cross = sum(qa * pb for qa, pb in zip(a.q, b.p))
    coeff = _weyl_coeff(a) * _weyl_coeff(b) / _weyl_coeff(label)
    phase = coeff * np.exp(-2j * np.pi * (cross % d) / d)
    return complex(phase), label


def _weyl_coeff(x: PhasePoint) -> complex:
    dot = sum(p * q for p, q in zip(x.p, x.q))
    if x.d == 2:
        return (1j) ** (-(dot % 4))
    return np.exp(2j * np.pi * ((-half(x.d) * dot) % x.d) / x.d)


def char_function(rho: np.ndarray, d: int = 2) -> np.ndarray:
    """Table of Xi(p, q) = Tr[rho w(-p, -q)] indexed ``[p_index, q_index]``."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    check_dim(dim)
    n = num_subsystems(dim, d)
    if n == 0:
        return rho.reshape(1, 1).copy()
    sub = sub_table(d, n)
    cols = np.arange(dim)
    # gathered[q, m] = rho[m - q, m]
    gathered = rho[sub.T, cols[None, :]]
    shape = (dim,) + (d,) * n
    axes = tuple(range(1, n + 1))
    raw = np.fft.ifftn(gathered.reshape(shape), axes=axes).reshape(dim, dim) * dim
    tr_zx = raw.T  # Tr[rho Z^p X^q] at [p, q]
    neg = neg_index(d, n)
    return weyl_phase_table(d, n)[np.ix_(neg, neg)] * tr_zx[np.ix_(neg, neg)]


def reconstruct(xi: np.ndarray, d: int = 2, check: bool = True, tol: float = 1e-9) -> np.ndarray:
    """Invert :func:`char_function`: rho = d^{-n} sum_x Xi(x) w(x).

    With ``check`` the result must have unit trace and be PSD to ``tol``,
    otherwise :class:`NonPhysicalError` ("non-physical table") is raised.
    """
    xi = np.asarray(xi, dtype=complex)
    dim = xi.shape[0]
    if xi.shape != (dim, dim):
        raise ValidationError("characteristic table must be square (d^n, d^n)")
    check_dim(dim)
    n = num_subsystems(dim, d)
    g = xi * weyl_phase_table(d, n)  # g[p, q]
    shape = (d,) * n + (dim,)
    h = np.fft.ifftn(g.reshape(shape), axes=tuple(range(n))).reshape(dim, dim)  # h[m, q]
    sub = sub_table(d, n)
    rho = np.zeros((dim, dim), dtype=complex)
    rows = np.arange(dim)[:, None]
    rho[rows, sub] = h
    dev = np.abs(rho - rho.conj().T).max()
    if dev > 0:
        logger.debug("reconstruct: symmetrizing, Hermiticity deviation %.3e", dev)
    rho = 0.5 * (rho + rho.conj().T)
    if check:
        tr = np.trace(rho).real
        if abs(tr - 1) > tol:
            raise NonPhysicalError(f"non-physical table: trace {tr:.6g} != 1")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < -tol:
            raise NonPhysicalError(f"non-physical table: min eigenvalue {lo:.3e} < 0")
    return rho


def purity_from_char(xi: np.ndarray) -> float:
    """Tr[rho^2] via Parseval, (1/d^n) sum |Xi|^2."""
    return float((np.abs(xi) ** 2).sum().real / xi.shape[0])
