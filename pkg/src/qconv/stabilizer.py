"""Exhaustive stabilizer and Clifford machinery at small n.

Enumeration is by breadth-first closure over generator matrices with
phase canonicalization, so the known group orders (24, 11520, 216) and
stabilizer-state counts (6, 60, 1080, 12) act as self-checks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import library as lib
from .errors import NotCliffordError, UnsupportedError, ValidationError
from .pauli import (
    PhasePoint,
    add_table,
    char_function,
    check_dim,
    digits,
    num_subsystems,
    reconstruct,
    vec_index,
    weyl_matrix,
)
from .states import dm, partial_trace

CLIFFORD_SUPPORT = {(2, 1), (2, 2), (3, 1)}
STABILIZER_SUPPORT = {(2, 1), (2, 2), (2, 3), (3, 1)}
MSPS_SUPPORT = {(2, 1), (2, 2), (2, 3), (3, 1)}
CLIFFORD_ORDER = {(2, 1): 24, (2, 2): 11520, (3, 1): 216}
STABILIZER_COUNT = {(2, 1): 6, (2, 2): 60, (2, 3): 1080, (3, 1): 12}

UNIT_TOL = 1e-9
_KEY_SCALE = 1e6


def canonical_phase(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate the global phase so the first entry with modulus > tol is positive real."""
    flat = a.ravel()
    k = int(np.argmax(np.abs(flat) > tol))
    z = flat[k]
    return a * (abs(z) / z)


def _key(a: np.ndarray) -> bytes:
    r = np.rint(np.concatenate([a.real.ravel(), a.imag.ravel()]) * _KEY_SCALE).astype(np.int64)
    return r.tobytes()


def phase_key(a: np.ndarray) -> bytes:
    """Hash key identifying an array up to global phase."""
    return _key(canonical_phase(a))


def _clifford_generators(d: int, n: int) -> list[np.ndarray]:
    if d == 2:
        gens = []
        for i in range(n):
            gens.append(lib.embed(lib.H, [i], n))
            gens.append(lib.embed(lib.S, [i], n))
        for i, j in itertools.permutations(range(n), 2):
            gens.append(lib.embed(lib.CNOT, [i, j], n))
        return gens
    if n == 1:
        return [lib.fourier(d), lib.qudit_phase_gate(d), lib.qudit_x(d), lib.qudit_z(d)]
    raise UnsupportedError(f"no generator set for (d={d}, n={n})")


@dataclass(eq=False)
class CliffordElement:
    """A Clifford unitary (phase-canonical) with lazily computed symplectic data."""

    matrix: np.ndarray
    d: int = 2

    @property
    def n(self) -> int:
        return num_subsystems(self.matrix.shape[0], self.d)

    @cached_property
    def _symplectic_data(self):
        return symplectic_of_clifford(self.matrix, self.d)

    @property
    def symplectic(self) -> np.ndarray:
        return self._symplectic_data[0]

    @property
    def phase_fn_samples(self) -> np.ndarray:
        return self._symplectic_data[1]


def _bfs_closure(start: np.ndarray, gens: list[np.ndarray], canon) -> dict[bytes, np.ndarray]:
    seen = {}
    first = canon(start)
    seen[_key(first)] = first
    frontier = [first]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = canon(s @ g)
                k = _key(h)
                if k not in seen:
                    seen[k] = h
                    nxt.append(h)
        frontier = nxt
    return seen


@lru_cache(maxsize=None)
def _clifford_matrices(d: int, n: int) -> tuple[np.ndarray, ...]:
    gens = _clifford_generators(d, n)
    found = _bfs_closure(np.eye(d**n, dtype=complex), gens, canonical_phase)
    mats = tuple(found.values())
    if len(mats) != CLIFFORD_ORDER[(d, n)]:
        raise RuntimeError(f"Clifford closure found {len(mats)} elements, expected {CLIFFORD_ORDER[(d, n)]}")
    return mats


def enumerate_cliffords(d: int, n: int) -> list[CliffordElement]:
    """The full Clifford group modulo global phase for (2,1), (2,2) or (3,1)."""
    if (d, n) not in CLIFFORD_SUPPORT:
        raise UnsupportedError(f"Clifford enumeration unsupported for (d={d}, n={n})")
    return [CliffordElement(m, d) for m in _clifford_matrices(d, n)]


def clifford_matrices(d: int, n: int) -> np.ndarray:
    """Stacked (|Cl|, d^n, d^n) array of the enumerated Clifford unitaries."""
    if (d, n) not in CLIFFORD_SUPPORT:
        raise UnsupportedError(f"Clifford enumeration unsupported for (d={d}, n={n})")
    return np.array(_clifford_matrices(d, n))


def _state_generators(d: int, n: int) -> list[np.ndarray]:
    if d == 2:
        return _clifford_generators(d, n)
    if n == 1:
        return [lib.fourier(d), lib.qudit_phase_gate(d)]
    raise UnsupportedError(f"no generator set for (d={d}, n={n})")


@lru_cache(maxsize=None)
def _stabilizer_vectors(d: int, n: int) -> tuple[np.ndarray, ...]:
    start = np.zeros(d**n, dtype=complex)
    start[0] = 1
    found = _bfs_closure(start, _state_generators(d, n), canonical_phase)
    vecs = tuple(found.values())
    if len(vecs) != STABILIZER_COUNT[(d, n)]:
        raise RuntimeError(f"stabilizer orbit has {len(vecs)} states, expected {STABILIZER_COUNT[(d, n)]}")
    return vecs


def stabilizer_vectors(d: int, n: int) -> np.ndarray:
    if (d, n) not in STABILIZER_SUPPORT:
        raise UnsupportedError(f"stabilizer enumeration unsupported for (d={d}, n={n})")
    return np.array(_stabilizer_vectors(d, n))


def enumerate_stabilizer_states(d: int, n: int) -> list[np.ndarray]:
    """All pure stabilizer states as density matrices (orbit of |0...0>)."""
    return [dm(v) for v in stabilizer_vectors(d, n)]


def unit_support(xi: np.ndarray, tol: float = UNIT_TOL) -> np.ndarray:
    return np.abs(xi) >= 1 - tol


def is_stabilizer_state(rho, d: int = 2, tol: float = UNIT_TOL) -> bool:
    """Pure stabilizer test: exactly d^n characteristic values of unit modulus."""
    rho = np.asarray(rho, dtype=complex)
    xi = char_function(rho, d)
    return int(unit_support(xi, tol).sum()) == rho.shape[0]


def is_msps(rho, d: int = 2, tol: float = UNIT_TOL) -> bool:
    """Every characteristic value has modulus 0 or 1: a normalized stabilizer projection."""
    mags = np.abs(char_function(np.asarray(rho, dtype=complex), d))
    return bool(np.all((mags < tol) | (mags > 1 - tol)))


@dataclass
class AbelianPauliGroup:
    """Labels (as (p_index, q_index) pairs) of an abelian Weyl subgroup with its character values."""

    d: int
    n: int
    labels: list
    characters: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.labels)

    def is_closed(self) -> bool:
        add = add_table(self.d, self.n)
        s = set(self.labels)
        return all((add[a[0], b[0]], add[a[1], b[1]]) in s for a in s for b in s)

    def is_commuting(self) -> bool:
        dig = digits(self.d, self.n)
        for a, b in itertools.combinations(self.labels, 2):
            sp = dig[a[0]] @ dig[b[1]] - dig[a[1]] @ dig[b[0]]
            if sp % self.d:
                return False
        return True


@dataclass
class MeanState:
    rho: np.ndarray
    support_group: AbelianPauliGroup
    unit_tol: float = UNIT_TOL


def mean_state(rho, d: int = 2, tol: float = UNIT_TOL) -> MeanState:
    """Keep the unit-modulus characteristic values of rho, zero the rest, reconstruct."""
    rho = np.asarray(rho, dtype=complex)
    n = num_subsystems(rho.shape[0], d)
    xi = char_function(rho, d)
    mask = unit_support(xi, tol)
    kept = np.where(mask, xi, 0)
    pis, qis = np.nonzero(mask)
    labels = list(zip(pis.tolist(), qis.tolist()))
    group = AbelianPauliGroup(d, n, labels, kept[pis, qis].tolist())
    if not group.is_closed():
        raise ValidationError("unit-modulus support is not closed under addition; tolerance too loose")
    return MeanState(reconstruct(kept, d, check=False), group, tol)


def magic_gap(rho, d: int = 2, support_tol: float = 1e-12, unit_tol: float = UNIT_TOL) -> float:
    """1 - max{|Xi| : support_tol < |Xi| < 1 - unit_tol}, or 0 if that set is empty."""
    mags = np.abs(char_function(np.asarray(rho, dtype=complex), d))
    mid = mags[(mags > support_tol) & (mags < 1 - unit_tol)]
    if mid.size == 0:
        return 0.0
    return float(1 - mid.max())


def symplectic_of_clifford(U, d: int = 2, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic matrix M and phase exponents f with U w(x) U^dag = omega^{f(x)} w(Mx).

    M acts on column vectors (p; q) of length 2n. ``f`` is returned as a
    (d^n, d^n) integer table indexed like characteristic functions.
    """
    U = np.asarray(U, dtype=complex)
    dim = U.shape[0]
    n = num_subsystems(dim, d)
    check_dim(dim)
    dig = digits(d, n)
    images = np.empty((dim, dim, 2), dtype=np.int64)
    f = np.empty((dim, dim), dtype=np.int64)
    Ud = U.conj().T
    for pi in range(dim):
        for qi in range(dim):
            w = weyl_matrix(PhasePoint(tuple(dig[pi]), tuple(dig[qi]), d))
            coeffs = char_function(U @ w @ Ud, d) / dim  # <w(y), U w U^dag>
            mags = np.abs(coeffs)
            k = int(np.argmax(mags))
            a, b = divmod(k, dim)
            if abs(mags[a, b] - 1) > tol or (mags.sum() - mags[a, b]) > tol:
                raise NotCliffordError("not Clifford: conjugated Weyl operator is not a single Weyl operator")
            images[pi, qi] = (a, b)
            ang = np.angle(coeffs[a, b]) / (2 * np.pi) * d
            f[pi, qi] = int(round(ang)) % d
    M = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for k in range(2 * n):
        e = np.zeros(2 * n, dtype=np.int64)
        e[k] = 1
        a, b = images[vec_index(e[:n], d), vec_index(e[n:], d)]
        M[:n, k] = dig[a]
        M[n:, k] = dig[b]
    for pi in range(dim):
        for qi in range(dim):
            x = np.concatenate([dig[pi], dig[qi]])
            y = (M @ x) % d
            if (vec_index(y[:n], d), vec_index(y[n:], d)) != tuple(images[pi, qi]):
                raise NotCliffordError("not Clifford: Weyl action is not linear")
    return M, f


def symplectic_form_matrix(n: int) -> np.ndarray:
    eye = np.eye(n, dtype=np.int64)
    zero = np.zeros((n, n), dtype=np.int64)
    return np.block([[zero, eye], [-eye, zero]])


def is_symplectic(M, d: int) -> bool:
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0] // 2
    omega = symplectic_form_matrix(n)
    return bool(np.all((M.T @ omega @ M - omega) % d == 0))


def _isotropic_subspaces(d: int, n: int) -> list[tuple[tuple[int, int], ...]]:
    """Isotropic subspaces of Z_d^{2n} as sorted tuples of flat vectors, each with a basis."""
    N = 2 * n
    vecs = [np.array(v) for v in itertools.product(range(d), repeat=N)][1:]
    found = {(): ()}
    bases = {(): []}

    def span(basis):
        pts = set()
        for coeffs in itertools.product(range(d), repeat=len(basis)):
            v = sum((c * b for c, b in zip(coeffs, basis)), np.zeros(N, dtype=np.int64)) % d
            pts.add(tuple(int(x) for x in v))
        return tuple(sorted(pts))

    def sform(a, b):
        return int(a[:n] @ b[n:] - a[n:] @ b[:n]) % d

    for r in range(1, n + 1):
        for combo in itertools.combinations(range(len(vecs)), r):
            basis = [vecs[i] for i in combo]
            if any(sform(a, b) for a, b in itertools.combinations(basis, 2)):
                continue
            pts = span(basis)
            if len(pts) != d**r or pts in found:
                continue
            found[pts] = pts
            bases[pts] = basis
    return [(pts, bases[pts]) for pts in found]


@lru_cache(maxsize=None)
def _msps(d: int, n: int) -> tuple[np.ndarray, ...]:
    dim = d**n
    out = {}
    for _, basis in _isotropic_subspaces(d, n):
        ws = [weyl_matrix(PhasePoint(tuple(b[:n]), tuple(b[n:]), d)) for b in basis]
        for chars in itertools.product(range(d), repeat=len(ws)):
            P = np.eye(dim, dtype=complex)
            for w, a in zip(ws, chars):
                shifted = np.exp(-2j * np.pi * a / d) * w
                proj = sum(np.linalg.matrix_power(shifted, k) for k in range(d)) / d
                P = P @ proj
            tr = np.trace(P).real
            if tr < 0.5:
                continue
            state = P / tr
            out.setdefault(_key(state), state)
    return tuple(out.values())


def msps_enumerate(d: int, n: int) -> list[np.ndarray]:
    """All minimal stabilizer-projection states (normalized minimal projections), deduplicated."""
    if (d, n) not in MSPS_SUPPORT:
        raise UnsupportedError(f"MSPS enumeration unsupported for (d={d}, n={n})")
    return list(_msps(d, n))


def stabilizer_fidelity(psi, d: int = 2) -> tuple[float, int]:
    """max |<psi|phi>|^2 over enumerated pure stabilizer states, with the argmax index."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim == 2:
        from .states import pure_vector

        psi = pure_vector(psi)
    n = num_subsystems(psi.shape[0], d)
    overlaps = np.abs(stabilizer_vectors(d, n).conj() @ psi) ** 2
    k = int(np.argmax(overlaps))
    return float(overlaps[k]), k


def reduced(rho, d: int, n: int, keep) -> np.ndarray:
    return partial_trace(rho, [d] * n, keep)
