import numpy as np
import pytest

from qconv import library as lib
from qconv.errors import NotCliffordError, ValidationError
from qconv.pauli import char_function
from qconv.stabilizer import (
    clifford_matrices,
    enumerate_cliffords,
    enumerate_stabilizer_states,
    is_msps,
    is_stabilizer_state,
    is_symplectic,
    magic_gap,
    mean_state,
    msps_enumerate,
    stabilizer_fidelity,
    stabilizer_vectors,
    symplectic_of_clifford,
)
from qconv.states import dm, random_state


@pytest.mark.parametrize("d,n,count", [(2, 1, 24), (2, 2, 11520), (3, 1, 216)])
def test_clifford_counts(d, n, count):
    assert len(clifford_matrices(d, n)) == count


@pytest.mark.parametrize("d,n,count", [(2, 1, 6), (2, 2, 60), (2, 3, 1080), (3, 1, 12)])
def test_stabilizer_counts(d, n, count):
    vecs = stabilizer_vectors(d, n)
    assert len(vecs) == count
    gram = np.abs(vecs.conj() @ vecs.T) ** 2
    assert np.abs(np.diag(gram) - 1).max() < 1e-12
    # pairwise distinct up to phase
    assert (gram - np.eye(count)).max() < 1 - 1e-6


def test_stabilizer_detection():
    for rho in enumerate_stabilizer_states(2, 2):
        assert is_stabilizer_state(rho)
        assert abs(np.abs(char_function(rho)).sum() - 4) < 1e-9
    assert not is_stabilizer_state(lib.named_state("T"))
    for rho in enumerate_stabilizer_states(3, 1):
        assert is_stabilizer_state(rho, 3)
    strange = np.array([0, 1, -1]) / np.sqrt(2)
    assert not is_stabilizer_state(dm(strange), 3)


def test_symplectic_examples():
    M, _ = symplectic_of_clifford(lib.H)
    assert np.array_equal(M, [[0, 1], [1, 0]])
    M, _ = symplectic_of_clifford(lib.S)
    assert is_symplectic(M, 2) and not np.array_equal(M, np.eye(2))
    with pytest.raises(NotCliffordError, match="not Clifford"):
        symplectic_of_clifford(lib.T)


@pytest.mark.parametrize("d,n", [(2, 1), (3, 1)])
def test_every_clifford_is_symplectic(d, n):
    for c in enumerate_cliffords(d, n):
        assert is_symplectic(c.symplectic, d)


def test_mean_state_examples():
    ms = mean_state(lib.named_state("T"))
    assert np.abs(ms.rho - np.eye(2) / 2).max() < 1e-12
    assert ms.support_group.order == 1
    for rho in enumerate_stabilizer_states(2, 2):
        ms = mean_state(rho)
        assert np.abs(ms.rho - rho).max() < 1e-10
        assert ms.support_group.order == 4
        assert ms.support_group.is_commuting() and ms.support_group.is_closed()


def test_mean_state_rejects_loose_tolerance():
    # |<X>| = |<Z>| = 0.707 but <Y> = 0: {I, X, Z} is not a group
    rho = 0.5 * (np.eye(2) + (lib.X + lib.Z) / np.sqrt(2))
    with pytest.raises(ValidationError):
        mean_state(rho, 2, tol=0.35)


def test_magic_gap_examples():
    assert abs(magic_gap(lib.named_state("T")) - (1 - 2**-0.5)) < 1e-12
    assert magic_gap(lib.named_state("zero")) == 0.0
    assert magic_gap(np.eye(2) / 2) == 0.0


def test_stabilizer_fidelity_examples():
    f, _ = stabilizer_fidelity(lib.t_vector())
    assert abs(f - np.cos(np.pi / 8) ** 2) < 1e-12
    f, _ = stabilizer_fidelity(lib.named_vector("plus"))
    assert abs(f - 1) < 1e-12


@pytest.mark.parametrize("d,n,count", [(2, 1, 7), (3, 1, 13), (2, 2, 91)])
def test_msps_enumeration(d, n, count):
    states = msps_enumerate(d, n)
    assert len(states) == count
    for s in states:
        assert abs(np.trace(s) - 1) < 1e-12
        assert np.linalg.eigvalsh(s).min() > -1e-12
        assert is_msps(s, d)


def test_msps_detection():
    assert is_msps(np.eye(4) / 4)
    assert is_msps(np.kron(np.diag([1.0, 0]), np.eye(2) / 2))
    assert not is_msps(random_state(0, 2, 1, "ginibre_mixed"))
