import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst
from scipy.linalg import fractional_matrix_power, logm

from qconv import library as lib
from qconv.channels import choi_of_unitary
from qconv.errors import ValidationError
from qconv.magic import (
    binary_renyi,
    channel_magic_entropy,
    circuit_growth_check,
    magic_entropy,
    magic_entropy_qudit,
    magic_spectrum,
    mrm,
    random_clifford_t_circuit,
    renyi_relative_entropy,
    tsallis_magic,
)
from qconv.stabilizer import clifford_matrices, enumerate_stabilizer_states
from qconv.states import dm, random_state, rng_for

ALPHAS = (0.5, 1.0, 2.0, np.inf)


def h(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def sandwiched_oracle(rho, sigma, alpha):
    # full-rank sigma only
    if alpha == 1:
        return np.trace(rho @ (logm(rho + 1e-300 * np.eye(len(rho))) - logm(sigma))).real / np.log(2)
    s = fractional_matrix_power(sigma, (1 - alpha) / (2 * alpha))
    m = s @ rho @ s
    w = np.clip(np.linalg.eigvalsh(0.5 * (m + m.conj().T)), 0, None)
    return np.log2((w**alpha).sum()) / (alpha - 1)


def test_known_values():
    assert abs(magic_entropy(lib.named_state("T")).value - h(0.25)) < 1e-12
    assert abs(magic_entropy(lib.named_state("H")).value - h(1 / 3)) < 1e-12
    assert abs(h(0.25) - 0.8112781245) < 1e-10
    assert abs(h(1 / 3) - 0.9182958341) < 1e-10
    assert np.abs(magic_spectrum(lib.t_vector()) - [0.75, 0.25]).max() < 1e-12


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_closed_forms(N, alpha):
    # the self-convolution of T (H) has Bloch length 2^-N (3^-N)
    t = magic_entropy(lib.t_vector(), N, alpha).value
    hh = magic_entropy(lib.h_vector(), N, alpha).value
    assert abs(t - binary_renyi(0.5 * (1 - 2.0**-N), alpha)) < 1e-10
    assert abs(hh - binary_renyi(0.5 * (1 - 3.0**-N), alpha)) < 1e-10
    tt = magic_entropy(np.kron(lib.t_vector(), lib.t_vector()), N, alpha).value
    assert abs(tt - 2 * t) < 1e-10


def test_stabilizer_states_have_zero_magic():
    for rho in enumerate_stabilizer_states(2, 2):
        assert abs(magic_entropy(rho).value) < 1e-9
        assert abs(mrm(rho).value) < 1e-9
    for rho in enumerate_stabilizer_states(3, 1):
        assert abs(magic_entropy_qudit(rho, 3).value) < 1e-9


def test_mixed_input_rejected():
    with pytest.raises(ValidationError, match="mixed"):
        magic_entropy(np.eye(2) / 2)


def test_tsallis_magic():
    assert abs(tsallis_magic(lib.t_vector(), 1, 2).value - 0.375) < 1e-12
    with pytest.raises(ValidationError):
        tsallis_magic(lib.t_vector(), 1, 0.5)


def test_clifford_invariance():
    rng = rng_for(1)
    Us = clifford_matrices(2, 2)
    for _ in range(10):
        psi = random_state(rng, 2, 2)
        U = Us[int(rng.integers(len(Us)))]
        for alpha in ALPHAS:
            a = magic_entropy(psi, 1, alpha).value
            b = magic_entropy(U @ psi @ U.conj().T, 1, alpha).value
            assert abs(a - b) < 1e-9


@settings(max_examples=30, deadline=None)
@given(hst.integers(0, 2**32 - 1), hst.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_relative_entropy_matches_oracle(seed, alpha):
    rng = rng_for(seed)
    rho = random_state(rng, 2, 2, "ginibre_mixed")
    sigma = random_state(rng, 2, 2, "ginibre_mixed")
    assert abs(renyi_relative_entropy(rho, sigma, alpha) - sandwiched_oracle(rho, sigma, alpha)) < 1e-8
    assert abs(renyi_relative_entropy(rho, rho, alpha)) < 1e-9
    assert renyi_relative_entropy(rho, sigma, alpha) > -1e-12


def test_relative_entropy_edge_cases():
    zero, one = lib.named_state("zero"), dm([0, 1])
    assert renyi_relative_entropy(zero, one, 1) == float("inf")
    assert renyi_relative_entropy(zero, one, 0.5) == float("inf")
    assert abs(renyi_relative_entropy(zero, np.eye(2) / 2, 1) - 1) < 1e-12
    assert abs(renyi_relative_entropy(zero, np.eye(2) / 2, np.inf) - 1) < 1e-12
    with pytest.raises(ValidationError):
        renyi_relative_entropy(zero, zero, 0.3)


def test_mrm_values():
    assert abs(mrm(lib.named_state("T")).value - 1) < 1e-9
    assert abs(mrm(lib.named_state("T"), method="oracle").value - 1) < 1e-9
    assert abs(mrm(lib.named_state("W", 2, 3)).value - 2) < 1e-9


@pytest.mark.parametrize("alpha", [1.0, 2.0, np.inf])
def test_mrm_closed_form_matches_oracle(alpha):
    rng = rng_for(2)
    for _ in range(10):
        rho = random_state(rng, 2, 1)
        a = mrm(rho, alpha).value
        b = mrm(rho, alpha, method="oracle").value
        assert abs(a - b) < 1e-8


def test_growth_under_clifford_t():
    rng = rng_for(3)
    for _ in range(20):
        n = 1 + int(rng.integers(2))
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1
        rep = circuit_growth_check(psi, random_clifford_t_circuit(rng, n, 8, 3))
        assert rep.t_count <= 3
        assert rep.me_bound_holds and rep.mrm_bound_holds


def test_channel_magic_entropy():
    assert abs(channel_magic_entropy(choi_of_unitary(lib.H)).value) < 1e-9
    t = channel_magic_entropy(choi_of_unitary(lib.T)).value
    assert t > 0.1
