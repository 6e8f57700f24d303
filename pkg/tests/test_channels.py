import numpy as np
import pytest

from qconv import library as lib
from qconv.channels import (
    apply_channel,
    bell_overlap_table,
    channel_clt_report,
    channel_from_choi,
    check_trace_preserving,
    choi_of_kraus,
    choi_of_unitary,
    classical_convolution_table,
    convolve_channels,
    depolarizing,
    hadamard_overlap_table,
    identity_channel,
    mean_channel,
    random_channel,
    random_unitary_channel,
)
from qconv.convolution import convolve_hadamard, convolve_qubit
from qconv.errors import ValidationError
from qconv.stabilizer import clifford_matrices, is_msps
from qconv.states import purity, random_state, random_unitary, rng_for


def test_unitary_choi_acts_by_conjugation():
    rng = rng_for(1)
    for n in (1, 2):
        U = random_unitary(2**n, rng)
        h = choi_of_unitary(U)
        rho = random_state(rng, 2, n, "ginibre_mixed")
        assert np.abs(apply_channel(h, rho) - U @ rho @ U.conj().T).max() < 1e-12
        assert abs(purity(h.choi) - 1) < 1e-12
    with pytest.raises(ValidationError):
        choi_of_unitary(np.array([[1, 1], [0, 1]]))


def test_kraus_and_depolarizing():
    p = 0.3
    kraus = [np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * lib.Z]
    h = choi_of_kraus(kraus)
    check_trace_preserving(h)
    rho = random_state(2, 2, 1, "ginibre_mixed")
    expect = (1 - p) * rho + p * lib.Z @ rho @ lib.Z
    assert np.abs(h(rho) - expect).max() < 1e-12
    dep = depolarizing(1)
    assert np.abs(dep(rho) - np.eye(2) / 2).max() < 1e-12
    assert np.abs(identity_channel(1)(rho) - rho).max() < 1e-12


def test_trace_preservation_check():
    with pytest.raises(ValidationError, match="trace preserving"):
        check_trace_preserving(channel_from_choi(np.diag([1.0, 0, 0, 0])))
    for s in range(5):
        check_trace_preserving(random_channel(rng_for(s), 1, 2, rank=3))


def test_choi_and_operational_paths_agree():
    rng = rng_for(3)
    for _ in range(5):
        hs = [random_channel(rng, 1, 2, rank=2) for _ in range(3)]
        a = convolve_channels(*hs, method="choi")
        b = convolve_channels(*hs, method="operational")
        assert np.abs(a.choi - b.choi).max() < 1e-10
        check_trace_preserving(a)


def test_depolarizing_absorbs():
    rng = rng_for(4)
    R = depolarizing(1)
    for _ in range(20):
        h1, h2 = random_channel(rng), random_channel(rng)
        out = convolve_channels(h1, h2, R)
        assert np.abs(out.choi - R.choi).max() < 1e-10


def test_mean_channel_of_t():
    m = mean_channel(choi_of_unitary(lib.T))
    ZZ = np.kron(lib.Z, lib.Z)
    assert np.abs(m.choi - 0.25 * (np.eye(4) + ZZ)).max() < 1e-12


def test_clifford_channels_stay_pure():
    for U in clifford_matrices(2, 1):
        h = choi_of_unitary(U)
        assert abs(purity(convolve_channels(h, h, h).choi) - 1) < 1e-9
    for U in (lib.T, lib.SQRT_T, random_unitary(2, rng_for(5))):
        h = choi_of_unitary(U)
        assert purity(convolve_channels(h, h, h).choi) < 1 - 1e-6


def test_distinct_cliffords_convolve_to_projection_state():
    Us = clifford_matrices(2, 1)
    rng = rng_for(6)
    for _ in range(10):
        hs = [choi_of_unitary(Us[i]) for i in rng.integers(len(Us), size=3)]
        assert is_msps(convolve_channels(*hs).choi)


def test_channel_clt():
    recs = channel_clt_report(choi_of_unitary(lib.T), [3, 5, 7])
    assert all(r.holds for r in recs)
    assert all(abs(r.diamond_bound - 4 * r.rhs) < 1e-12 for r in recs)
    recs = channel_clt_report(random_unitary_channel(rng_for(7)), [3, 5])
    assert all(r.holds for r in recs)


def test_bell_tables_are_distributions():
    rho = random_state(8, 2, 2, "ginibre_mixed")
    t = bell_overlap_table(rho)
    assert t.min() > -1e-12 and abs(t.sum() - 1) < 1e-12


def test_bell_tables_convolve_classically():
    rng = rng_for(9)
    for _ in range(5):
        states = [random_state(rng, 2, 2, "ginibre_mixed") for _ in range(3)]
        lhs = bell_overlap_table(convolve_qubit(states))
        rhs = classical_convolution_table([bell_overlap_table(s) for s in states])
        assert np.abs(lhs - rhs).max() < 1e-12


def test_hadamard_bell_tables():
    rng = rng_for(10)
    for _ in range(3):
        r, s = random_state(rng, 3, 2, "ginibre_mixed"), random_state(rng, 3, 2, "ginibre_mixed")
        lhs = bell_overlap_table(convolve_hadamard(r, s, 3), 3)
        rhs = hadamard_overlap_table(bell_overlap_table(r, 3), bell_overlap_table(s, 3), 3)
        assert np.abs(lhs - rhs).max() < 1e-12
