import numpy as np
import pytest

from qconv import library as lib
from qconv.errors import UnsupportedError, ValidationError
from qconv.protocols import (
    acceptance_probability_gate,
    acceptance_probability_state,
    bound_sweep,
    bounds,
    clifford_epsilon,
    swap_circuit_oracle,
    swap_test_sample,
)
from qconv.stabilizer import clifford_matrices, enumerate_stabilizer_states
from qconv.states import random_state, rng_for


def test_t_state_acceptance():
    rep = acceptance_probability_state(lib.t_vector())
    assert abs(rep.p_accept - 13 / 16) < 1e-12
    assert abs(rep.epsilon - (1 - np.cos(np.pi / 8) ** 2)) < 1e-12
    assert rep.lower_bound <= rep.p_accept <= 1


def test_stabilizer_states_always_accepted():
    for rho in enumerate_stabilizer_states(2, 2):
        rep = acceptance_probability_state(rho)
        assert abs(rep.p_accept - 1) < 1e-9 and rep.epsilon < 1e-9
    for rho in enumerate_stabilizer_states(3, 1):
        assert abs(acceptance_probability_state(rho, 3).p_accept - 1) < 1e-9


def test_mixed_state_rejected():
    with pytest.raises(ValidationError, match="mixed"):
        acceptance_probability_state(np.eye(2) / 2)


def test_bounds_shape():
    assert bounds(0.0, 2) == (1.0, 1.0)
    lo, up = bounds(0.1, 3)
    assert abs(lo - 0.5 * (1 + 0.9**4)) < 1e-15 and abs(up - 0.8) < 1e-15


def test_gate_acceptance():
    for U in clifford_matrices(2, 1):
        assert abs(acceptance_probability_gate(U).p_accept - 1) < 1e-9
    assert abs(acceptance_probability_gate(lib.fourier(3), 3).p_accept - 1) < 1e-9
    rep = acceptance_probability_gate(lib.T)
    assert rep.p_accept < 1 - 1e-3
    assert rep.lower_bound <= rep.p_accept + 1e-12
    assert abs(clifford_epsilon(lib.T) - (1 - np.cos(np.pi / 8) ** 2)) < 1e-12


def test_large_clifford_scan_is_opt_in():
    with pytest.raises(UnsupportedError):
        clifford_epsilon(lib.CNOT)
    assert clifford_epsilon(lib.CNOT, scan_large=True) < 1e-9
    rep = acceptance_probability_gate(lib.CNOT)
    assert rep.epsilon is None and abs(rep.p_accept - 1) < 1e-9


def test_swap_sampling_is_deterministic_and_calibrated():
    a = swap_test_sample(13 / 16, 10**5, seed=4)
    assert a == swap_test_sample(13 / 16, 10**5, seed=4)
    assert a != swap_test_sample(13 / 16, 10**5, seed=5)
    sigma = np.sqrt(13 / 16 * 3 / 16 / 10**5)
    outside = sum(abs(swap_test_sample(13 / 16, 10**5, s)["empirical_rate"] - 13 / 16) > 3 * sigma for s in range(20))
    assert outside <= 3
    with pytest.raises(ValidationError):
        swap_test_sample(1.5, 10, 0)
    with pytest.raises(ValidationError):
        swap_test_sample(0.5, 0, 0)


def test_swap_circuit_oracle():
    rng = rng_for(1)
    for n in (1, 2):
        r, s = random_state(rng, 2, n, "ginibre_mixed"), random_state(rng, 2, n, "ginibre_mixed")
        assert abs(swap_circuit_oracle(r, s) - 0.5 * (1 + np.trace(r @ s).real)) < 1e-12


def test_shots_attached_to_report():
    rep = acceptance_probability_state(lib.t_vector(), shots=1000, seed=2)
    assert rep.shots["count"] == 1000
    assert rep.shots == acceptance_probability_state(lib.t_vector(), shots=1000, seed=2).shots


def test_bound_sweep_small():
    res = bound_sweep(2, 1, 30, seed=0)
    assert res.violations == 0 and len(res.reports) == 30
    res3 = bound_sweep(3, 1, 30, seed=0)
    assert res3.violations == 0
    with pytest.raises(UnsupportedError):
        bound_sweep(5, 1, 3, seed=0)
