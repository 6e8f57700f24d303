"""Density matrices: validation, spectra, entropies, majorization, samplers.

All entropies are in bits except the Tsallis family, which carries no log.
States are plain complex ndarrays; the local dimension ``d`` is passed
explicitly where it matters.
"""
from __future__ import annotations

import logging
from functools import reduce

import mpmath
import numpy as np

from .errors import NonPhysicalError, ValidationError
from .pauli import check_dim, num_subsystems

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEG_EIG_TOL = 1e-9
RANK_TOL = 1e-9
SUBENTROPY_CLUSTER = 1e-8
SUBENTROPY_EPS = 1e-5


def validate_density_matrix(rho, d: int = 2) -> np.ndarray:
    """Return rho as a complex array after checking it is a d^n-dim state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError("density matrix must be square")
    check_dim(rho.shape[0])
    num_subsystems(rho.shape[0], d)
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITIAN_TOL:
        raise NonPhysicalError(f"not Hermitian (deviation {herm:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise NonPhysicalError(f"trace {tr:.12g} != 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -NEG_EIG_TOL:
        raise NonPhysicalError(f"not positive semidefinite (min eigenvalue {lo:.3e})")
    return rho


def ket(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    if v.ndim != 1 and not (v.ndim == 2 and 1 in v.shape):
        raise ValidationError(f"expected a state vector, got shape {v.shape}")
    v = v.ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValidationError("zero vector")
    return v / norm


def dm(vec) -> np.ndarray:
    """Projector onto the normalized vector."""
    v = ket(vec)
    return np.outer(v, v.conj())


def kron_all(*ops) -> np.ndarray:
    return reduce(np.kron, ops)


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.vdot(rho, rho).real)


def is_pure(rho, tol: float = 1e-9) -> bool:
    return abs(purity(rho) - 1) < tol


def pure_vector(rho, tol: float = 1e-9) -> np.ndarray:
    """Leading eigenvector of a pure density matrix."""
    w, v = np.linalg.eigh(rho)
    if abs(w[-1] - 1) > tol:
        raise ValidationError("state is not pure")
    return v[:, -1]


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``; order of ``keep`` is preserved."""
    dims = list(dims)
    k = len(dims)
    keep = list(keep)
    drop = [i for i in range(k) if i not in keep]
    t = np.asarray(rho).reshape(dims + dims)
    perm = keep + drop + [k + i for i in keep] + [k + i for i in drop]
    t = t.transpose(perm)
    dk = int(np.prod([dims[i] for i in keep]))
    dd = int(np.prod([dims[i] for i in drop]))
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def permute_subsystems(op, dims, perm) -> np.ndarray:
    """Reorder tensor factors of an operator: new factor i is old factor ``perm[i]``."""
    dims = list(dims)
    k = len(dims)
    t = np.asarray(op).reshape(dims + dims)
    t = t.transpose(list(perm) + [k + p for p in perm])
    D = int(np.prod(dims))
    return t.reshape(D, D)


def spectrum(rho) -> np.ndarray:
    """Eigenvalues sorted non-increasing; tiny negatives are clamped to zero."""
    rho = np.asarray(rho, dtype=complex)
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITIAN_TOL:
        raise ValidationError(f"eigen-decomposition needs a Hermitian matrix (deviation {herm:.3e})")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[::-1].copy()
    return clamp_spectrum(w)


def clamp_spectrum(w) -> np.ndarray:
    w = np.sort(np.asarray(w, dtype=float))[::-1].copy()
    if w.size and w[-1] < -NEG_EIG_TOL:
        raise NonPhysicalError(f"negative eigenvalue {w[-1]:.3e}")
    neg = w < 0
    if neg.any():
        logger.debug("clamping %d eigenvalues in [-1e-9, 0)", int(neg.sum()))
        w[neg] = 0.0
    return w


def _as_spectrum(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim == 2:
        return spectrum(x)
    return clamp_spectrum(x)


def renyi_from_spectrum(w, alpha: float) -> float:
    w = clamp_spectrum(w)
    if alpha == 0:
        return float(np.log2(np.count_nonzero(w > RANK_TOL)))
    if alpha == 1:
        nz = w[w > 0]
        return float(-(nz * np.log2(nz)).sum()) + 0.0
    if np.isinf(alpha):
        return float(-np.log2(w[0])) + 0.0
    nz = w[w > 0]
    return float(np.log2((nz**alpha).sum()) / (1 - alpha)) + 0.0


def renyi_entropy(rho, alpha: float = 1.0) -> float:
    """Quantum Renyi entropy S_alpha in bits; alpha in [0, inf]."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return renyi_from_spectrum(_as_spectrum(rho), alpha)


def von_neumann_entropy(rho) -> float:
    return renyi_entropy(rho, 1.0)


def tsallis_entropy(rho, alpha: float) -> float:
    """T_alpha = (Tr rho^alpha - 1) / (1 - alpha); alpha = 1 is the von Neumann limit in nats."""
    if alpha < 1:
        raise ValueError("Tsallis entropy is defined here for alpha >= 1")
    w = _as_spectrum(rho)
    nz = w[w > 0]
    if alpha == 1:
        return float(-(nz * np.log(nz)).sum()) + 0.0
    if np.isinf(alpha):
        return 0.0
    return float(((nz**alpha).sum() - 1) / (1 - alpha))


def _split_clusters(w, eps):
    """Spread each eigenvalue cluster symmetrically by multiples of ``eps``."""
    w = list(w)
    out = []
    i = 0
    while i < len(w):
        j = i
        while j + 1 < len(w) and abs(w[j + 1] - w[i]) <= SUBENTROPY_CLUSTER:
            j += 1
        m = j - i + 1
        center = mpmath.mpf(sum(w[i : j + 1])) / m
        step = mpmath.mpf(eps)
        if m > 1 and center - step * (m - 1) / 2 <= 0:
            step = center / m
        for k in range(m):
            out.append(center + (k - mpmath.mpf(m - 1) / 2) * step)
        i = j + 1
    return out


def _subentropy_distinct(lams) -> mpmath.mpf:
    D = len(lams)
    total = mpmath.mpf(0)
    for i, li in enumerate(lams):
        denom = mpmath.mpf(1)
        for j, lj in enumerate(lams):
            if j != i:
                denom *= li - lj
        total += li**D * mpmath.log(li) / denom
    return -total


def subentropy(rho) -> float:
    """Subentropy in bits.

    Zero eigenvalues drop out exactly (a divided-difference identity); any
    remaining cluster of eigenvalues within 1e-8 is split symmetrically by
    +-k*eps with eps = 1e-5, evaluated at eps and eps/2 and
    Richardson-extrapolated. Evaluation runs in 60-digit arithmetic so the
    near-singular denominators do not cancel catastrophically.
    """
    w = _as_spectrum(rho)
    w = sorted((float(x) for x in w if x > 1e-12), reverse=True)
    with mpmath.workdps(60):
        if len(w) <= 1:
            return 0.0
        gaps = [a - b for a, b in zip(w, w[1:])]
        if min(gaps) > SUBENTROPY_CLUSTER:
            val = _subentropy_distinct([mpmath.mpf(x) for x in w])
        else:
            q1 = _subentropy_distinct(_split_clusters(w, SUBENTROPY_EPS))
            q2 = _subentropy_distinct(_split_clusters(w, SUBENTROPY_EPS / 2))
            # symmetric splitting leaves an even error series in eps
            val = (4 * q2 - q1) / 3
        return float(val / mpmath.log(2))


def majorizes(a, b, tol: float = 1e-9) -> bool:
    """True iff a is majorized by b (a < b): prefix sums of b dominate those of a."""
    a = np.sort(np.asarray(a, dtype=float))[::-1]
    b = np.sort(np.asarray(b, dtype=float))[::-1]
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    if abs(a.sum() - 1) > tol or abs(b.sum() - 1) > tol:
        raise ValidationError("majorization compares probability vectors summing to 1")
    return bool(np.all(np.cumsum(a) <= np.cumsum(b) + tol))


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for stream ``stream`` under a 64-bit master seed."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *[int(s) for s in stream]])
    return np.random.Generator(np.random.Philox(ss))


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_state(seed, d: int = 2, n: int = 1, kind: str = "haar_pure") -> np.ndarray:
    """Deterministic random state; ``seed`` is an int or a ``numpy.random.Generator``."""
    dim = d**n
    check_dim(dim)
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed)
    if kind == "haar_pure":
        return dm(haar_vector(dim, rng))
    if kind == "ginibre_mixed":
        G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = G @ G.conj().T
        return rho / np.trace(rho).real
    if kind == "diagonal":
        p = rng.dirichlet(np.ones(dim))
        return np.diag(p).astype(complex)
    raise ValueError(f"unknown random state kind {kind!r}")


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    Z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph
