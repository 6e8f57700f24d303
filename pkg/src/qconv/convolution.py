"""K-fold qubit convolution via the CNOT key unitary, and the qudit Hadamard convolution.

Subsystem blocks are ordered 1..K, each holding n subsystems, and the
convolution keeps block 1. Three computation paths exist for the qubit case:

* ``dense_key_unitary``: build V as a dense matrix, conjugate, partial trace.
* ``char_duality``: multiply characteristic functions with the parity sign.
* ``pure_cnot_network``: apply the CNOT list to a pure amplitude vector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import library as lib
from .errors import ValidationError
from .pauli import (
    char_function,
    check_dim,
    digits,
    dot_table,
    half,
    num_subsystems,
    reconstruct,
    scale_index,
)
from .stabilizer import UNIT_TOL, magic_gap, mean_state, symplectic_of_clifford
from .states import kron_all, partial_trace, pure_vector

METHODS = ("char_duality", "dense_key_unitary", "pure_cnot_network")
DEFAULT_METHOD = "char_duality"


def _check_K(K: int) -> int:
    if K < 3 or K % 2 == 0:
        raise ValidationError(f"K must be odd and >= 3, got {K}")
    return (K - 1) // 2


def cnot_list(K: int, n: int) -> list[tuple[int, int]]:
    """(control, target) qubit pairs of the key unitary, in application order.

    Qubit i of block j sits at position j*n + i (blocks and qubits 0-based).
    """
    _check_K(K)
    gates = []
    for i in range(n):
        for j in range(1, K):
            gates.append((i, j * n + i))
        for j in range(1, K):
            gates.append((j * n + i, i))
    return gates


def _bits(total: int) -> np.ndarray:
    idx = np.arange(2**total)
    return (idx[:, None] >> np.arange(total - 1, -1, -1)[None, :]) & 1


def key_permutation(K: int, n: int) -> np.ndarray:
    """``perm[x]`` is the basis index V|x> for the key unitary on K*n qubits."""
    total = K * n
    check_dim(2**total)
    b = _bits(total).copy()
    for c, t in cnot_list(K, n):
        b[:, t] ^= b[:, c]
    weights = 1 << np.arange(total - 1, -1, -1)
    return b @ weights


def key_unitary_dense(K: int, n: int) -> np.ndarray:
    """Dense permutation matrix of the key unitary V = U^{(x)n}."""
    perm = key_permutation(K, n)
    dim = perm.size
    V = np.zeros((dim, dim), dtype=complex)
    V[perm, np.arange(dim)] = 1
    return V


def _validate_inputs(states, d: int = 2) -> tuple[list[np.ndarray], int]:
    states = [np.asarray(s, dtype=complex) for s in states]
    dims = {s.shape for s in states}
    if len(dims) != 1:
        raise ValidationError("all inputs must share the same dimension")
    dim = states[0].shape[0]
    return states, num_subsystems(dim, d)


def parity_sign(n: int, N: int) -> np.ndarray:
    """(-1)^{N p.q} with p.q the integer dot product, as a (2^n, 2^n) table."""
    return np.where((N * dot_table(2, n)) % 2, -1.0, 1.0)


def convolve_chars(xis, N: int) -> np.ndarray:
    n = num_subsystems(xis[0].shape[0], 2)
    out = parity_sign(n, N).astype(complex)
    for xi in xis:
        out = out * xi
    return out


def convolve_qubit(states, method: str = DEFAULT_METHOD) -> np.ndarray:
    """K-fold convolution of qubit states (K = len(states), odd)."""
    states, n = _validate_inputs(states, 2)
    K = len(states)
    N = _check_K(K)
    if method == "char_duality":
        xis = [char_function(s, 2) for s in states]
        return reconstruct(convolve_chars(xis, N), 2, check=False)
    if method == "dense_key_unitary":
        V = key_unitary_dense(K, n)
        big = V @ kron_all(*states) @ V.conj().T
        return partial_trace(big, [2**n] * K, [0])
    if method == "pure_cnot_network":
        vecs = [pure_vector(s) for s in states]
        return _convolve_pure(vecs, K, n)
    raise ValidationError(f"unknown method {method!r}; choose from {METHODS}")


def _convolve_pure(vecs, K: int, n: int) -> np.ndarray:
    amp = kron_all(*vecs)
    perm = key_permutation(K, n)
    out = np.empty_like(amp)
    out[perm] = amp
    block = out.reshape(2**n, -1)
    return block @ block.conj().T


def convolve_pure_vectors(vecs, method: str = "pure_cnot_network") -> np.ndarray:
    """Convenience wrapper taking state vectors instead of density matrices."""
    vecs = [np.asarray(v, dtype=complex) for v in vecs]
    n = num_subsystems(vecs[0].size, 2)
    K = len(vecs)
    _check_K(K)
    if method == "pure_cnot_network":
        return _convolve_pure(vecs, K, n)
    return convolve_qubit([np.outer(v, v.conj()) for v in vecs], method)


def self_convolve(rho, K: int = 3, method: str = DEFAULT_METHOD) -> np.ndarray:
    return convolve_qubit([rho] * K, method)


def inverse_key_unitary_map(rho, K: int = 3) -> np.ndarray:
    """V^dag (rho (x) I/2^n (x) ... ) V on K blocks."""
    rho = np.asarray(rho, dtype=complex)
    n = num_subsystems(rho.shape[0], 2)
    V = key_unitary_dense(K, n)
    mixed = np.eye(2**n) / 2**n
    big = kron_all(rho, *([mixed] * (K - 1)))
    return V.conj().T @ big @ V


def hadamard_permutation(d: int, n: int) -> np.ndarray:
    """``perm[a, b]`` (flattened) is the basis index V_H|a, b> on 2n qudits.

    U_H |x+y, x-y> = |x, y>, applied pairwise to subsystem i of each block.
    """
    h = half(d)
    dig = digits(d, n)
    dim = d**n
    a = dig[:, None, :]
    b = dig[None, :, :]
    x = (h * (a + b)) % d
    y = (h * (a - b)) % d
    weights = d ** np.arange(n - 1, -1, -1)
    xi = (x * weights).sum(-1)
    yi = (y * weights).sum(-1)
    return (xi * dim + yi).ravel()


def hadamard_unitary_dense(d: int, n: int) -> np.ndarray:
    if d == 2:
        raise ValidationError("Hadamard convolution needs an odd prime d")
    perm = hadamard_permutation(d, n)
    dim = perm.size
    check_dim(dim)
    V = np.zeros((dim, dim), dtype=complex)
    V[perm, np.arange(dim)] = 1
    return V


def hadamard_chars(xi_rho: np.ndarray, xi_sigma: np.ndarray, d: int) -> np.ndarray:
    """Xi_out(p, q) = Xi_rho(2^{-1} p, q) Xi_sigma(2^{-1} p, q)."""
    n = num_subsystems(xi_rho.shape[0], d)
    hp = scale_index(d, n, half(d))
    return xi_rho[hp, :] * xi_sigma[hp, :]


def convolve_hadamard(rho, sigma, d: int, method: str = "char_duality") -> np.ndarray:
    """Qudit Hadamard convolution rho [H] sigma for odd prime d."""
    if d == 2:
        raise ValidationError("Hadamard convolution needs an odd prime d; use the qubit path")
    (rho, sigma), n = _validate_inputs([rho, sigma], d)
    if method == "char_duality":
        out = hadamard_chars(char_function(rho, d), char_function(sigma, d), d)
        return reconstruct(out, d, check=False)
    if method == "dense_key_unitary":
        V = hadamard_unitary_dense(d, n)
        big = V @ np.kron(rho, sigma) @ V.conj().T
        return partial_trace(big, [d**n, d**n], [0])
    raise ValidationError(f"unknown Hadamard method {method!r}")


def self_convolve_state(rho, d: int = 2, K: int = 3, method: str = DEFAULT_METHOD) -> np.ndarray:
    """The self-convolution used by the tests: K-fold for qubits, Hadamard for odd d."""
    if d == 2:
        return self_convolve(rho, K, method)
    return convolve_hadamard(rho, rho, d, "char_duality" if method == "pure_cnot_network" else method)


def iterate_convolution(rho, K: int) -> np.ndarray:
    """K-fold self-convolution built from repeated 3-fold steps: X <- conv3(rho, rho, X)."""
    _check_K(K)
    rho = np.asarray(rho, dtype=complex)
    out = convolve_qubit([rho] * 3)
    for _ in range((K - 3) // 2):
        out = convolve_qubit([rho, rho, out])
    return out


def sharp(rho, K: int) -> np.ndarray:
    """rho^T for odd N = (K-1)/2, rho otherwise."""
    N = _check_K(K)
    rho = np.asarray(rho, dtype=complex)
    return rho.T.copy() if N % 2 else rho


@dataclass
class CLTRecord:
    K: int
    lhs: float
    rhs: float
    holds: bool


def clt_report(rho, K_list, tol: float = 1e-9, unit_tol: float = UNIT_TOL,
               support_tol: float = 1e-12) -> list[CLTRecord]:
    """Compare ||conv_K rho - M(rho#)||_2 against (1 - MG)^{K-1} ||rho - M(rho)||_2."""
    rho = np.asarray(rho, dtype=complex)
    num_subsystems(rho.shape[0], 2)
    mg = magic_gap(rho, 2, support_tol, unit_tol)
    base = np.linalg.norm(rho - mean_state(rho, 2, unit_tol).rho)
    xi = char_function(rho, 2)
    out = []
    for K in K_list:
        N = _check_K(K)
        conv = reconstruct(convolve_chars([xi] * K, N), 2, check=False)
        lhs = float(np.linalg.norm(conv - mean_state(sharp(rho, K), 2, unit_tol).rho))
        rhs = float((1 - mg) ** (K - 1) * base)
        out.append(CLTRecord(K, lhs, rhs, lhs <= rhs + tol))
    return out


def clifford_companion(U, K: int = 3) -> np.ndarray:
    """The unitary U_1 with U_1 conv_K(rho_i) U_1^dag = conv_K(U rho_i U^dag).

    With U^dag w(x) U = +-w(Mx) and M = [[A, B], [C, D]], U_1 = X^a Z^b U where
    a_i = [A^T C]_ii and b_i = [B^T D]_ii (mod 2). For K = 1 mod 4, U_1 = U.
    """
    N = _check_K(K)
    U = np.asarray(U, dtype=complex)
    n = num_subsystems(U.shape[0], 2)
    if N % 2 == 0:
        return U.copy()
    M, _ = symplectic_of_clifford(U.conj().T, 2)
    A, B = M[:n, :n], M[:n, n:]
    C, D = M[n:, :n], M[n:, n:]
    a = np.diag(A.T @ C) % 2
    b = np.diag(B.T @ D) % 2
    pauli = kron_all(*[
        np.linalg.matrix_power(lib.X, int(ai)) @ np.linalg.matrix_power(lib.Z, int(bi)) for ai, bi in zip(a, b)
    ])
    return pauli @ U

