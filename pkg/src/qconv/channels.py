"""Choi-state calculus and convolution of channels.

A channel on n subsystems is stored as its Choi state J = (id (x) L)|Phi><Phi|
on 2n subsystems, input block A first and output block B second. It acts by
L(rho) = D Tr_A[J (rho^T (x) I)], with D = d^n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolution import (
    CLTRecord,
    clt_report,
    convolve_qubit,
    inverse_key_unitary_map,
    key_unitary_dense,
)
from .errors import ValidationError
from .pauli import PhasePoint, add_table, digits, half, num_subsystems, scale_index, weyl_matrix
from .stabilizer import magic_gap, mean_state
from .states import partial_trace, renyi_entropy

TP_TOL = 1e-9
UNITARY_TOL = 1e-10


@dataclass
class ChannelHandle:
    choi: np.ndarray
    n: int
    d: int = 2
    unitary: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.d**self.n

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


def max_entangled(D: int) -> np.ndarray:
    return np.eye(D, dtype=complex).reshape(-1) / np.sqrt(D)


def choi_of_unitary(U, d: int = 2) -> ChannelHandle:
    U = np.asarray(U, dtype=complex)
    D = U.shape[0]
    n = num_subsystems(D, d)
    if np.abs(U.conj().T @ U - np.eye(D)).max() > UNITARY_TOL:
        raise ValidationError("matrix is not unitary")
    v = np.kron(np.eye(D), U) @ max_entangled(D)
    return ChannelHandle(np.outer(v, v.conj()), n, d, U.copy())


def choi_of_kraus(kraus, d: int = 2) -> ChannelHandle:
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    D = kraus[0].shape[0]
    n = num_subsystems(D, d)
    phi = max_entangled(D)
    J = np.zeros((D * D, D * D), dtype=complex)
    for k in kraus:
        v = np.kron(np.eye(D), k) @ phi
        J += np.outer(v, v.conj())
    return ChannelHandle(J, n, d)


def channel_from_choi(J, d: int = 2) -> ChannelHandle:
    J = np.asarray(J, dtype=complex)
    D2 = J.shape[0]
    D = int(round(np.sqrt(D2)))
    if D * D != D2:
        raise ValidationError("Choi matrix dimension must be a square")
    h = ChannelHandle(J, num_subsystems(D, d), d)
    check_trace_preserving(h)
    return h


def depolarizing(n: int, d: int = 2) -> ChannelHandle:
    """The completely depolarizing channel R(rho) = Tr(rho) I/D."""
    D = d**n
    return ChannelHandle(np.eye(D * D, dtype=complex) / (D * D), n, d)


def identity_channel(n: int, d: int = 2) -> ChannelHandle:
    return choi_of_unitary(np.eye(d**n), d)


def random_channel(rng: np.random.Generator, n: int = 1, d: int = 2, rank: int = 2) -> ChannelHandle:
    """Channel from a Haar-random isometry D -> D*rank (Stinespring)."""
    D = d**n
    G = rng.normal(size=(D * rank, D)) + 1j * rng.normal(size=(D * rank, D))
    Q, _ = np.linalg.qr(G)
    kraus = [Q[k * D:(k + 1) * D, :] for k in range(rank)]
    return choi_of_kraus(kraus, d)


def check_trace_preserving(h: ChannelHandle, tol: float = TP_TOL) -> None:
    red = partial_trace(h.choi, [h.dim, h.dim], [0])
    dev = np.abs(red - np.eye(h.dim) / h.dim).max()
    if dev > tol:
        raise ValidationError(f"Choi state is not trace preserving (deviation {dev:.3e})")


def apply_channel(h: ChannelHandle, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    D = h.dim
    if rho.shape != (D, D):
        raise ValidationError(f"input has shape {rho.shape}, channel expects {(D, D)}")
    J4 = h.choi.reshape(D, D, D, D)
    return D * np.einsum("xAyB,xy->AB", J4, rho)


def _apply_on_block(h: ChannelHandle, X: np.ndarray, block: int, K: int) -> np.ndarray:
    D = h.dim
    J4 = h.choi.reshape(D, D, D, D)
    t = X.reshape((D,) * (2 * K))
    t = np.moveaxis(t, [block, K + block], [0, 1])
    t = D * np.einsum("xAyB,xy...->AB...", J4, t)
    t = np.moveaxis(t, [0, 1], [block, K + block])
    return t.reshape(D**K, D**K)


def convolve_channels(h1: ChannelHandle, h2: ChannelHandle, h3: ChannelHandle,
                      method: str = "choi") -> ChannelHandle:
    """Three-fold convolution of qubit channels.

    ``choi`` convolves the Choi states on 2n qubits; ``operational`` builds the
    Choi state of conv3 o (L1 (x) L2 (x) L3) o conv3^{-1} from matrix units.
    """
    hs = (h1, h2, h3)
    if any(h.d != 2 for h in hs):
        raise ValidationError("channel convolution is defined for qubit channels")
    if len({h.n for h in hs}) != 1:
        raise ValidationError("channels act on different numbers of qubits")
    if method == "choi":
        return ChannelHandle(convolve_qubit([h.choi for h in hs]), h1.n, 2)
    if method == "operational":
        return _choi_of_map(lambda rho: operational_convolution(hs, rho), h1.n, 2)
    raise ValidationError(f"unknown channel-convolution method {method!r}")


def operational_convolution(hs, rho) -> np.ndarray:
    """conv3((L1 (x) L2 (x) L3)(conv3^{-1}(rho)))."""
    n = hs[0].n
    X = inverse_key_unitary_map(rho, 3)
    for k, h in enumerate(hs):
        X = _apply_on_block(h, X, k, 3)
    V = key_unitary_dense(3, n)
    return partial_trace(V @ X @ V.conj().T, [2**n] * 3, [0])


def _choi_of_map(fn, n: int, d: int) -> ChannelHandle:
    D = d**n
    J = np.zeros((D, D, D, D), dtype=complex)
    for i in range(D):
        for j in range(D):
            E = np.zeros((D, D), dtype=complex)
            E[i, j] = 1
            J[i, :, j, :] = fn(E) / D
    return ChannelHandle(J.reshape(D * D, D * D), n, d)


def choi_of_map(fn, n: int, d: int = 2) -> ChannelHandle:
    """Choi state of a linear map given as a Python callable on D x D matrices."""
    return _choi_of_map(fn, n, d)


def mean_channel(h: ChannelHandle) -> ChannelHandle:
    return ChannelHandle(mean_state(h.choi, h.d).rho, h.n, h.d)


def channel_entropy(h: ChannelHandle, alpha: float = 1.0) -> float:
    return renyi_entropy(h.choi, alpha)


def channel_magic_gap(h: ChannelHandle) -> float:
    return magic_gap(h.choi, h.d)


@dataclass
class ChannelCLTRecord(CLTRecord):
    diamond_bound: float = 0.0


def channel_clt_report(h: ChannelHandle, K_list, tol: float = 1e-9, **tols) -> list[ChannelCLTRecord]:
    """Choi-level 2-norm chain, plus the 2^{2n}-scaled value as a diamond-norm bound."""
    scale = 2 ** (2 * h.n)
    return [
        ChannelCLTRecord(r.K, r.lhs, r.rhs, r.holds, scale * r.rhs)
        for r in clt_report(h.choi, K_list, tol, **tols)
    ]


def bell_overlap_table(rho, d: int = 2) -> np.ndarray:
    """rho(p, q) = <w(p,q)|rho|w(p,q)> with |w(p,q)> = (w(p,q) (x) I)|Phi>, indexed [p, q]."""
    rho = np.asarray(rho, dtype=complex)
    D = int(round(np.sqrt(rho.shape[0])))
    n = num_subsystems(D, d)
    dig = digits(d, n)
    phi = max_entangled(D).reshape(D, D)
    out = np.empty((D, D))
    R = rho.reshape(D, D, D, D)
    for pi in range(D):
        for qi in range(D):
            w = weyl_matrix(PhasePoint(tuple(dig[pi]), tuple(dig[qi]), d))
            v = w @ phi  # (w (x) I)|Phi> reshaped as a D x D array
            out[pi, qi] = np.einsum("ab,abcd,cd->", v.conj(), R, v).real
    return out


def classical_convolution_table(tables, d: int = 2) -> np.ndarray:
    """sum over x_1 + ... + x_K = x of prod_i t_i(x_i), on Z_d^{2n}."""
    D = tables[0].shape[0]
    n = num_subsystems(D, d)
    add = add_table(d, n)
    out = tables[0]
    for t in tables[1:]:
        nxt = np.zeros_like(out)
        for a in range(D):
            for b in range(D):
                nxt[np.ix_(add[a], add[b])] += out[a, b] * t
        out = nxt
    return out


def hadamard_overlap_table(t_rho: np.ndarray, t_sigma: np.ndarray, d: int) -> np.ndarray:
    """sum over (a,b) + (c,e) = (p, 2q) of t_rho(a,b) t_sigma(c,e)."""
    D = t_rho.shape[0]
    n = num_subsystems(D, d)
    summed = classical_convolution_table([t_rho, t_sigma], d)
    h = scale_index(d, n, half(d))
    out = np.empty_like(summed)
    out[:, h] = summed  # the q-sum 2q lands at q = 2^{-1} * sum
    return out


def random_unitary_channel(rng: np.random.Generator, n: int = 1) -> ChannelHandle:
    from .states import random_unitary

    return choi_of_unitary(random_unitary(2**n, rng))
