"""Convolution plus swap-test property tests for stabilizer states and Clifford gates."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .channels import choi_of_unitary
from .convolution import convolve_hadamard, convolve_qubit
from .errors import UnsupportedError, ValidationError
from .library import H as HADAMARD
from .pauli import check_prime, num_subsystems
from .stabilizer import CLIFFORD_SUPPORT, STABILIZER_SUPPORT, clifford_matrices, stabilizer_fidelity
from .states import dm, haar_vector, is_pure, pure_vector, purity, rng_for

BOUND_TOL = 1e-9
LARGE_CLIFFORD_SCAN = {(2, 2)}


@dataclass
class TestReport:
    __test__ = False  # not a pytest class

    subject: str
    d: int
    n: int
    p_accept: float
    epsilon: float | None = None
    lower_bound: float | None = None
    upper_bound_expansion: float | None = None
    shots: dict | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def self_convolution_purity(rho, d: int) -> float:
    """Tr[(conv rho)^2]: 3-fold convolution for qubits, Hadamard convolution for odd d."""
    if d == 2:
        return purity(convolve_qubit([rho] * 3))
    return purity(convolve_hadamard(rho, rho, d))


def acceptance_from_purity(pur: float) -> float:
    return 0.5 * (1 + pur)


def bounds(epsilon: float, d: int) -> tuple[float, float]:
    """(lower bound, leading upper-bound term) for the acceptance probability."""
    if d == 2:
        return 0.5 * (1 + (1 - epsilon) ** 6), 1 - 3 * epsilon
    return 0.5 * (1 + (1 - epsilon) ** 4), 1 - 2 * epsilon


def _fill_bounds(rep: TestReport) -> TestReport:
    if rep.epsilon is not None:
        rep.lower_bound, rep.upper_bound_expansion = bounds(rep.epsilon, rep.d)
    return rep


def _as_pure(psi):
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim == 1:
        return dm(psi), psi / np.linalg.norm(psi)
    if not is_pure(psi):
        raise ValidationError("the stabilizer test takes a pure state; input is mixed")
    return psi, pure_vector(psi)


def acceptance_probability_state(psi, d: int = 2, shots: int | None = None, seed: int = 0) -> TestReport:
    check_prime(d)
    rho, vec = _as_pure(psi)
    n = num_subsystems(rho.shape[0], d)
    rep = TestReport("state", d, n, acceptance_from_purity(self_convolution_purity(rho, d)), seed=seed)
    if (d, n) in STABILIZER_SUPPORT:
        fid, _ = stabilizer_fidelity(vec, d)
        rep.epsilon = max(0.0, 1 - fid)
    _fill_bounds(rep)
    if shots:
        rep.shots = swap_test_sample(rep.p_accept, shots, seed)
    return rep


def clifford_epsilon(U, d: int = 2, scan_large: bool = False) -> float:
    """1 - max over enumerated Cliffords V of |Tr[V^dag U] / d^n|^2."""
    U = np.asarray(U, dtype=complex)
    n = num_subsystems(U.shape[0], d)
    if (d, n) not in CLIFFORD_SUPPORT or ((d, n) in LARGE_CLIFFORD_SCAN and not scan_large):
        raise UnsupportedError(f"Clifford scan not available for (d={d}, n={n})")
    Vs = clifford_matrices(d, n)
    overlaps = np.abs(np.einsum("kij,ij->k", Vs.conj(), U) / U.shape[0]) ** 2
    return max(0.0, 1 - float(overlaps.max()))


def acceptance_probability_gate(U, d: int = 2, shots: int | None = None, seed: int = 0,
                                scan_large: bool = False) -> TestReport:
    """Run the state test on the Choi state of U; epsilon from the Clifford scan when available."""
    check_prime(d)
    U = np.asarray(U, dtype=complex)
    n = num_subsystems(U.shape[0], d)
    J = choi_of_unitary(U, d).choi
    rep = TestReport("gate", d, n, acceptance_from_purity(self_convolution_purity(J, d)), seed=seed)
    try:
        rep.epsilon = clifford_epsilon(U, d, scan_large)
    except UnsupportedError:
        pass
    _fill_bounds(rep)
    if shots:
        rep.shots = swap_test_sample(rep.p_accept, shots, seed)
    return rep


def swap_test_sample(p_accept: float, shots: int, seed: int, stream: int = 0) -> dict:
    """Bernoulli(p_accept) outcomes for ``shots`` swap tests, deterministic per seed."""
    if not 0 <= p_accept <= 1 + BOUND_TOL:
        raise ValidationError("p_accept must lie in [0, 1]")
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    p = min(max(p_accept, 0.0), 1.0)
    count = int(rng_for(seed, 1, stream).binomial(shots, p))
    rate = count / shots
    return {
        "count": int(shots),
        "accept_count": count,
        "empirical_rate": rate,
        "stderr": float(np.sqrt(rate * (1 - rate) / shots)),
    }


def swap_circuit_oracle(rho, sigma) -> float:
    """Ancilla-H, controlled-SWAP, ancilla-H circuit; probability the ancilla reads 0."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    D = rho.shape[0]
    if sigma.shape != rho.shape:
        raise ValidationError("swap test needs equal dimensions")
    swap = np.zeros((D * D, D * D))
    for i in range(D):
        for j in range(D):
            swap[j * D + i, i * D + j] = 1
    P0 = np.diag([1.0, 0.0])
    P1 = np.diag([0.0, 1.0])
    cswap = np.kron(P0, np.eye(D * D)) + np.kron(P1, swap)
    had = np.kron(HADAMARD, np.eye(D * D))
    circ = had @ cswap @ had
    state = np.kron(P0, np.kron(rho, sigma))
    out = circ @ state @ circ.conj().T
    return float(np.trace(out[: D * D, : D * D]).real)


@dataclass
class SweepResult:
    d: int
    n: int
    seed: int
    reports: list
    violations: int
    fitted_C: float


def _sweep_one(args) -> TestReport:
    d, n, seed, i = args
    vec = haar_vector(d**n, rng_for(seed, 2, i))
    return acceptance_probability_state(vec, d)


def bound_sweep(d: int, n: int, num_states: int, seed: int, parallel: bool = False) -> SweepResult:
    """Haar-random pure states: count lower-bound violations and fit the O(eps^2) constant.

    The fitted constant is max (p - 1 + c eps) / eps^2, a diagnostic only.
    """
    if (d, n) not in STABILIZER_SUPPORT:
        raise UnsupportedError(f"epsilon needs stabilizer enumeration at (d={d}, n={n})")
    jobs = [(d, n, seed, i) for i in range(num_states)]
    if parallel:
        with ProcessPoolExecutor() as ex:
            reports = list(ex.map(_sweep_one, jobs))
    else:
        reports = [_sweep_one(j) for j in jobs]
    c = 3 if d == 2 else 2
    violations = sum(r.p_accept < r.lower_bound - BOUND_TOL for r in reports)
    fits = [(r.p_accept - 1 + c * r.epsilon) / r.epsilon**2 for r in reports if r.epsilon > 1e-6]
    return SweepResult(d, n, seed, reports, int(violations), float(max(fits)) if fits else 0.0)
