"""Property suites run by ``qconv verify``.

Every suite is a function of a context object that carries the seed and
trial count and collects ``PropertyResult`` rows. With ``trials=None`` each
property uses its default sample size; otherwise every random sweep is
truncated to ``trials`` instances. Randomness for suite ``s``
and property ``k`` comes from ``rng_for(seed, SUITE_STREAM, s, k)``.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import channels as ch
from . import convolution as cv
from . import library as lib
from . import magic as mg
from . import protocols as pr
from . import stabilizer as st
from .pauli import PhasePoint, char_function, digits, purity_from_char, reconstruct, weyl_compose, weyl_matrix
from .states import (
    dm,
    haar_vector,
    majorizes,
    partial_trace,
    pure_vector,
    purity,
    random_state,
    random_unitary,
    renyi_entropy,
    rng_for,
    spectrum,
    subentropy,
    tsallis_entropy,
)

logger = logging.getLogger(__name__)

SUITE_STREAM = 7
ALPHAS = (0.5, 1.0, 2.0, np.inf)


@dataclass
class PropertyResult:
    suite: str
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measured"] = _finite(self.measured)
        return d


def _finite(x):
    x = float(x)
    if np.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


class _Ctx:
    def __init__(self, suite: str, index: int, seed: int, trials: int | None):
        self.suite, self.index, self.seed, self.trials = suite, index, seed, trials
        self.results: list[PropertyResult] = []
        self._k = 0

    def rng(self) -> np.random.Generator:
        self._k += 1
        return rng_for(self.seed, SUITE_STREAM, self.index, self._k)

    def count(self, default: int) -> int:
        return default if self.trials is None else min(default, self.trials)

    def max_dev(self, name: str, dev: float, tol: float, detail: str = "") -> None:
        self.results.append(PropertyResult(self.suite, name, bool(dev <= tol), float(dev), tol, detail))

    def check(self, name: str, ok: bool, measured: float = 0.0, tol: float = 0.0, detail: str = "") -> None:
        self.results.append(PropertyResult(self.suite, name, bool(ok), float(measured), tol, detail))


def _all_labels(d, n):
    dig = digits(d, n)
    return [PhasePoint(tuple(dig[a]), tuple(dig[b]), d) for a in range(d**n) for b in range(d**n)]


def suite_pauli(c: _Ctx) -> None:
    dev = 0.0
    for d, n in [(2, 1), (3, 1), (2, 2)]:
        labels = _all_labels(d, n)
        mats = {x: weyl_matrix(x) for x in labels}
        for a in labels:
            for b in labels:
                ph, lab = weyl_compose(a, b)
                dev = max(dev, np.abs(mats[a] @ mats[b] - ph * mats[lab]).max())
    c.max_dev("weyl_compose_matches_dense", dev, 1e-12)

    dev = 0.0
    for d, n in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        W = np.array([weyl_matrix(x) for x in _all_labels(d, n)])
        gram = np.einsum("aij,bij->ab", W.conj(), W) / d**n
        dev = max(dev, np.abs(gram - np.eye(len(W))).max())
    c.max_dev("weyl_orthonormality", dev, 1e-12)

    dev = par = 0.0
    for d, n in [(2, 1), (2, 2), (3, 1)]:
        rng = c.rng()
        for _ in range(c.count(100)):
            rho = random_state(rng, d, n, "ginibre_mixed")
            xi = char_function(rho, d)
            dev = max(dev, np.abs(reconstruct(xi, d) - rho).max())
            par = max(par, abs(purity_from_char(xi) - purity(rho)))
    c.max_dev("char_reconstruct_round_trip", dev, 1e-10)
    c.max_dev("parseval_identity", par, 1e-10)

    ok = True
    for d, n in [(2, 1), (2, 2), (3, 1)]:
        for psi in st.enumerate_stabilizer_states(d, n):
            ok &= int(st.unit_support(char_function(psi, d)).sum()) == d**n
        rng = c.rng()
        for _ in range(c.count(20)):
            ok &= not st.is_stabilizer_state(random_state(rng, d, n), d)
    c.check("unit_support_iff_stabilizer", ok)


def suite_states(c: _Ctx) -> None:
    rng = c.rng()
    worst = 0.0
    add = 0.0
    for _ in range(c.count(50)):
        rho = random_state(rng, 2, 2, "ginibre_mixed")
        vals = [renyi_entropy(rho, a) for a in (0, 0.5, 1, 2, np.inf)]
        worst = max(worst, max(b - a for a, b in zip(vals, vals[1:])))
        sig = random_state(rng, 2, 1, "ginibre_mixed")
        for a in ALPHAS:
            add = max(add, abs(renyi_entropy(np.kron(rho, sig), a) - renyi_entropy(rho, a) - renyi_entropy(sig, a)))
    c.max_dev("renyi_non_increasing_in_alpha", worst, 1e-9)
    c.max_dev("renyi_additive", add, 1e-9)

    rng = c.rng()
    viol = 0.0
    checked = 0
    for _ in range(c.count(50)):
        a = random_state(rng, 2, 1, "diagonal")
        b = random_state(rng, 2, 1, "diagonal")
        sa, sb = spectrum(a), spectrum(b)
        if not majorizes(sa, sb):
            a, b, sa, sb = b, a, sb, sa
        if not majorizes(sa, sb):
            continue
        checked += 1
        for f in (lambda r: renyi_entropy(r, 1), lambda r: renyi_entropy(r, 2), lambda r: tsallis_entropy(r, 2),
                  subentropy):
            viol = max(viol, f(b) - f(a))
    c.max_dev("schur_concavity", viol, 1e-8, f"{checked} majorized pairs")

    rng = c.rng()
    worst = 0.0
    for _ in range(c.count(20)):
        rho = random_state(rng, 2, 2, "ginibre_mixed")
        worst = max(worst, subentropy(rho) - renyi_entropy(rho, 1))
    c.max_dev("subentropy_below_entropy", worst, 1e-9)


def suite_stabilizer(c: _Ctx) -> None:
    counts = {f"cliffords{k}": len(st.clifford_matrices(*k)) for k in st.CLIFFORD_ORDER}
    counts.update({f"stabilizers{k}": len(st.stabilizer_vectors(*k)) for k in st.STABILIZER_COUNT})
    ok = all(counts[f"cliffords{k}"] == v for k, v in st.CLIFFORD_ORDER.items())
    ok &= all(counts[f"stabilizers{k}"] == v for k, v in st.STABILIZER_COUNT.items())
    ok &= len(st.msps_enumerate(2, 1)) == 7
    c.check("enumeration_counts", ok, detail=str(counts))

    ok = True
    for d in (2, 3):
        mats = st.clifford_matrices(d, 1)
        keys = {st.phase_key(m) for m in mats}
        ok &= all(st.phase_key(a @ b) in keys for a in mats for b in mats)
    c.check("clifford_group_law_n1", ok)

    ok = True
    for d, n in [(2, 1), (3, 1)]:
        keys = {st.phase_key(v) for v in st.stabilizer_vectors(d, n)}
        ok &= all(st.phase_key(U @ v) in keys for U in st.clifford_matrices(d, n) for v in st.stabilizer_vectors(d, n))
    rng = c.rng()
    mats = st.clifford_matrices(2, 2)
    keys = {st.phase_key(v) for v in st.stabilizer_vectors(2, 2)}
    for k in rng.choice(len(mats), size=c.count(200), replace=False):
        ok &= all(st.phase_key(mats[k] @ v) in keys for v in st.stabilizer_vectors(2, 2))
    c.check("stabilizer_orbit_closure", ok)

    ok = all(st.is_symplectic(el.symplectic, el.d) for d in (2, 3) for el in st.enumerate_cliffords(d, 1))
    c.check("clifford_symplectic_n1", ok)

    rng = c.rng()
    dev = 0.0
    closed = True
    for _ in range(c.count(100)):
        rho = random_state(rng, 2, 2, "ginibre_mixed") if rng.random() < 0.5 else _random_mixture_of_msps(rng)
        m1 = st.mean_state(rho)
        m2 = st.mean_state(m1.rho)
        dev = max(dev, np.abs(m1.rho - m2.rho).max())
        closed &= m1.support_group.is_closed() and m1.support_group.is_commuting()
    c.max_dev("mean_state_idempotent", dev, 1e-10)
    c.check("mean_state_support_is_group", closed)


def _random_mixture_of_msps(rng) -> np.ndarray:
    msps = st.msps_enumerate(2, 2)
    i, j = rng.integers(len(msps), size=2)
    return 0.5 * (msps[i] + msps[j])


def _random_triple(rng, n):
    return [random_state(rng, 2, n, "ginibre_mixed") for _ in range(3)]


def suite_convolution(c: _Ctx) -> None:
    dev = 0.0
    rng = c.rng()
    for n, default in [(1, 100), (2, 25)]:
        for _ in range(c.count(default)):
            rs = _random_triple(rng, n)
            a = cv.convolve_qubit(rs, "char_duality")
            b = cv.convolve_qubit(rs, "dense_key_unitary")
            dev = max(dev, np.abs(a - b).max())
            dx = np.abs(char_function(b) - cv.convolve_chars([char_function(r) for r in rs], 1)).max()
            dev = max(dev, dx)
    c.max_dev("duality_vs_dense_key_unitary", dev, 1e-10)

    rng = c.rng()
    dev = 0.0
    for _ in range(c.count(20)):
        vs = [haar_vector(4, rng) for _ in range(3)]
        a = cv.convolve_pure_vectors(vs)
        b = cv.convolve_qubit([dm(v) for v in vs], "dense_key_unitary")
        dev = max(dev, np.abs(a - b).max())
    c.max_dev("cnot_network_vs_dense", dev, 1e-10)

    rng = c.rng()
    dev = comm = 0.0
    for _ in range(c.count(100)):
        r, s = random_state(rng, 3, 1, "ginibre_mixed"), random_state(rng, 3, 1, "ginibre_mixed")
        a = cv.convolve_hadamard(r, s, 3)
        dev = max(dev, np.abs(a - cv.convolve_hadamard(r, s, 3, "dense_key_unitary")).max())
        comm = max(comm, np.abs(a - cv.convolve_hadamard(s, r, 3)).max())
    c.max_dev("hadamard_duality_vs_dense", dev, 1e-10)
    c.max_dev("hadamard_commutative", comm, 1e-10)

    rng = c.rng()
    sym = maj_fail = ent = 0.0
    for n in (1, 2):
        for _ in range(c.count(50)):
            rs = _random_triple(rng, n)
            out = cv.convolve_qubit(rs)
            for perm in itertools.permutations(range(3)):
                sym = max(sym, np.abs(cv.convolve_qubit([rs[i] for i in perm]) - out).max())
            so = spectrum(out)
            maj_fail += sum(not majorizes(so, spectrum(r)) for r in rs)
            for a in ALPHAS:
                ent = max(ent, max(renyi_entropy(r, a) for r in rs) - renyi_entropy(so, a))
    c.max_dev("permutation_symmetry", sym, 1e-10)
    c.check("majorization", maj_fail == 0, maj_fail, 0)
    c.max_dev("entropy_growth", ent, 1e-9)

    dev = 0.0
    for n in (1, 2):
        for psi in st.enumerate_stabilizer_states(2, n):
            dev = max(dev, abs(purity(cv.convolve_qubit([psi] * 3)) - 1))
    for psi in st.enumerate_stabilizer_states(3, 1):
        dev = max(dev, abs(purity(cv.convolve_hadamard(psi, psi, 3)) - 1))
    c.max_dev("purity_invariance_stabilizers", dev, 1e-9)

    rng = c.rng()
    ok = True
    for n in (1, 2):
        vecs = st.stabilizer_vectors(2, n)
        keys = {st.phase_key(v) for v in vecs}
        for _ in range(c.count(30)):
            i, j, k = rng.integers(len(vecs), size=3)
            out = cv.convolve_qubit([dm(vecs[i]), dm(vecs[j]), dm(vecs[k])])
            ok &= st.is_msps(out)
            same = cv.convolve_qubit([dm(vecs[i])] * 3)
            ok &= st.phase_key(pure_vector(same)) in keys
    c.check("convolutional_stability_states", ok)
    rng = c.rng()
    worst = 0.0
    subjects = [lib.named_state("T"), lib.named_state("H")]
    subjects += [random_state(rng, 2, 1 + i % 2) for i in range(c.count(50))]
    for psi in subjects:
        worst = max(worst, purity(cv.convolve_qubit([psi] * 3)))
    c.check("purity_drop_non_stabilizers", worst < 1 - 1e-6, worst, 1 - 1e-6)

    rng = c.rng()
    dev = 0.0
    for n in (1, 2):
        for _ in range(c.count(10)):
            r, s = random_state(rng, 2, n, "ginibre_mixed"), random_state(rng, 2, n, "ginibre_mixed")
            mixed = np.eye(2**n) / 2**n
            dev = max(dev, np.abs(cv.convolve_qubit([r, s, mixed]) - mixed).max())
    c.max_dev("identity_absorption", dev, 1e-12)

    rng = c.rng()
    dev3 = dev5 = 0.0
    nontrivial = 0
    for U in st.clifford_matrices(2, 1):
        rs = _random_triple(rng, 1)
        U1 = cv.clifford_companion(U, 3)
        lhs = U1 @ cv.convolve_qubit(rs) @ U1.conj().T
        rhs = cv.convolve_qubit([U @ r @ U.conj().T for r in rs])
        dev3 = max(dev3, np.abs(lhs - rhs).max())
        nontrivial += st.phase_key(U1) != st.phase_key(U)
        rs5 = rs + _random_triple(rng, 1)[:2]
        lhs = U @ cv.convolve_qubit(rs5) @ U.conj().T
        rhs = cv.convolve_qubit([U @ r @ U.conj().T for r in rs5])
        dev5 = max(dev5, np.abs(lhs - rhs).max())
    c.max_dev("clifford_commutativity_K3", dev3, 1e-10, f"{nontrivial} of 24 need a Pauli correction")
    c.max_dev("clifford_commutativity_K5_plain", dev5, 1e-10)

    rng = c.rng()
    dev = 0.0
    for n in (1, 2):
        for _ in range(c.count(20)):
            rs = _random_triple(rng, n) if rng.random() < 0.5 else _structured_triple(rng, n)
            lhs = st.mean_state(cv.convolve_qubit(rs)).rho
            rhs = cv.convolve_qubit([st.mean_state(r).rho for r in rs])
            dev = max(dev, np.abs(lhs - rhs).max())
    c.max_dev("mean_state_exchange", dev, 1e-10)

    rng = c.rng()
    dev = 0.0
    for K in (5, 7, 9):
        r = random_state(rng, 2, 1 + K % 2, "ginibre_mixed")
        dev = max(dev, np.abs(cv.iterate_convolution(r, K) - cv.convolve_qubit([r] * K)).max())
    c.max_dev("iterated_three_fold_matches_direct", dev, 1e-10)

    rng = c.rng()
    eq = 0.0
    strict = np.inf
    for _ in range(c.count(20)):
        n = 1 + int(rng.integers(2))
        U = st.clifford_matrices(2, n)[int(rng.integers(len(st.clifford_matrices(2, n))))]
        basis = U  # columns of U are a stabilizer basis sharing one group
        p = rng.dirichlet(np.ones(2**n))
        r1 = (basis * p) @ basis.conj().T
        i, j = rng.integers(2**n, size=2)
        r2, r3 = dm(basis[:, i]), dm(basis[:, j])
        out = cv.convolve_qubit([r1, r2, r3])
        for a in ALPHAS:
            eq = max(eq, abs(renyi_entropy(out, a) - renyi_entropy(r1, a)))
        T = lib.named_state("T", n=n)
        outT = cv.convolve_qubit([T, r2, r3])
        strict = min(strict, min(renyi_entropy(outT, a) - renyi_entropy(T, a) for a in ALPHAS))
    c.max_dev("entropy_equality_case", eq, 1e-9)
    c.check("entropy_strict_for_T", strict >= 1e-3, strict, 1e-3)


def _structured_triple(rng, n):
    """Triples with non-trivial mean states: Clifford-rotated diagonal states and stabilizers."""
    mats = st.clifford_matrices(2, n)
    out = []
    for _ in range(3):
        U = mats[int(rng.integers(len(mats)))]
        out.append(U @ random_state(rng, 2, n, "diagonal") @ U.conj().T)
    return out


def suite_clt(c: _Ctx) -> None:
    rng = c.rng()
    subjects = [("T", lib.named_state("T"))]
    subjects += [(f"random{i}", random_state(rng, 2, 1 + i % 2, "ginibre_mixed" if i % 3 else "haar_pure"))
                 for i in range(c.count(20))]
    worst = 0.0
    mono = 0.0
    for _, rho in subjects:
        recs = cv.clt_report(rho, [3, 5, 7, 9])
        worst = max(worst, max(r.lhs - r.rhs for r in recs))
        mono = max(mono, max(b.lhs - a.lhs for a, b in zip(recs, recs[1:])))
    c.max_dev("clt_bound", worst, 1e-9)
    c.max_dev("clt_lhs_non_increasing", mono, 1e-9)


def suite_channels(c: _Ctx) -> None:
    rng = c.rng()
    dev = 0.0
    for U in list(st.clifford_matrices(2, 1)) + [lib.T]:
        h = ch.choi_of_unitary(U)
        rho = random_state(rng, 2, 1, "ginibre_mixed")
        dev = max(dev, np.abs(ch.apply_channel(h, rho) - U @ rho @ U.conj().T).max())
    c.max_dev("choi_round_trip", dev, 1e-10)

    rng = c.rng()
    tp = dev_r = 0.0
    R = ch.depolarizing(1)
    for _ in range(c.count(20)):
        a, b = ch.random_channel(rng), ch.random_channel(rng)
        out = ch.convolve_channels(a, b, R)
        dev_r = max(dev_r, np.abs(out.choi - R.choi).max())
        out3 = ch.convolve_channels(a, b, ch.random_channel(rng))
        red = st.reduced(out3.choi, 2, 2, [0])
        tp = max(tp, np.abs(red - np.eye(2) / 2).max())
    c.max_dev("depolarizing_absorption", dev_r, 1e-10)
    c.max_dev("choi_convolution_is_choi", tp, 1e-9)

    mT = ch.mean_channel(ch.choi_of_unitary(lib.T)).choi
    target = 0.25 * (np.eye(4) + np.kron(lib.Z, lib.Z))
    c.max_dev("mean_channel_of_T", np.abs(mT - target).max(), 1e-10)

    rng = c.rng()
    ok = True
    for U in list(st.clifford_matrices(2, 1)):
        h = ch.choi_of_unitary(U)
        ok &= abs(purity(ch.convolve_channels(h, h, h).choi) - 1) < 1e-9
    for U in (lib.T, lib.SQRT_T, random_unitary(2, rng)):
        h = ch.choi_of_unitary(U)
        ok &= purity(ch.convolve_channels(h, h, h).choi) < 1 - 1e-6
    c.check("self_convolution_unitary_iff_clifford", ok)

    rng = c.rng()
    dev = sym = ent = 0.0
    stab_ok = True
    mats = st.clifford_matrices(2, 1)
    for _ in range(c.count(5)):
        hs = [ch.random_channel(rng) for _ in range(3)]
        a = ch.convolve_channels(*hs)
        b = ch.convolve_channels(*hs, method="operational")
        dev = max(dev, np.abs(a.choi - b.choi).max())
        for perm in itertools.permutations(range(3)):
            sym = max(sym, np.abs(ch.convolve_channels(*[hs[i] for i in perm]).choi - a.choi).max())
        for alpha in ALPHAS:
            ent = max(ent, max(ch.channel_entropy(h, alpha) for h in hs) - ch.channel_entropy(a, alpha))
        cl = [ch.choi_of_unitary(mats[int(k)]) for k in rng.integers(len(mats), size=3)]
        stab_ok &= st.is_msps(ch.convolve_channels(*cl).choi)
    c.max_dev("exact_formula_two_paths", dev, 1e-9)
    c.max_dev("channel_permutation_invariance", sym, 1e-10)
    c.max_dev("channel_entropy_growth", ent, 1e-9)
    c.check("channel_convolutional_stability", stab_ok)

    rng = c.rng()
    dev = 0.0
    for _ in range(c.count(5)):
        rho = random_state(rng, 2, 1, "ginibre_mixed")
        V = cv.key_unitary_dense(3, 1)
        back = partial_trace(V @ cv.inverse_key_unitary_map(rho) @ V.conj().T, [2] * 3, [0])
        dev = max(dev, np.abs(back - rho).max())
    c.max_dev("inverse_convolution_identity", dev, 1e-12)

    rng = c.rng()
    dev = 0.0
    for _ in range(c.count(10)):
        rs = _random_triple(rng, 2)
        tabs = [ch.bell_overlap_table(r) for r in rs]
        dev = max(dev, np.abs(ch.classical_convolution_table(tabs) - ch.bell_overlap_table(cv.convolve_qubit(rs))).max())
        r, s = random_state(rng, 3, 2, "ginibre_mixed"), random_state(rng, 3, 2, "ginibre_mixed")
        pred = ch.hadamard_overlap_table(ch.bell_overlap_table(r, 3), ch.bell_overlap_table(s, 3), 3)
        dev = max(dev, np.abs(pred - ch.bell_overlap_table(cv.convolve_hadamard(r, s, 3), 3)).max())
    c.max_dev("bell_basis_convolution_tables", dev, 1e-10)

    recs = ch.channel_clt_report(ch.choi_of_unitary(lib.T), [3, 5, 7])
    worst = max(r.lhs - r.rhs for r in recs)
    mono = max(b.lhs - a.lhs for a, b in zip(recs, recs[1:]))
    c.max_dev("channel_clt_T_gate", max(worst, mono), 1e-9)
    mg_t = ch.channel_magic_gap(ch.choi_of_unitary(lib.T))
    c.max_dev("channel_magic_gap_T", abs(mg_t - (1 - 2**-0.5)), 1e-12)
    clif = ch.channel_clt_report(ch.choi_of_unitary(lib.H), [3, 5])
    c.max_dev("channel_clt_clifford_zero", max(max(r.lhs, r.rhs) for r in clif), 1e-10)


def suite_magic(c: _Ctx) -> None:
    T, Hs = lib.named_state("T"), lib.named_state("H")
    dev = 0.0
    for N in (1, 2, 3):
        for a in ALPHAS:
            dev = max(dev, abs(mg.magic_entropy(T, N, a).value - mg.binary_renyi(0.5 * (1 - 2.0**-N), a)))
            dev = max(dev, abs(mg.magic_entropy(Hs, N, a).value - mg.binary_renyi(0.5 * (1 - 3.0**-N), a)))
    c.max_dev("closed_forms_T_H", dev, 1e-9)
    c.max_dev("magic_spectrum_T", np.abs(mg.magic_spectrum(T) - [0.75, 0.25]).max(), 1e-10)

    rng = c.rng()
    inv = 0.0
    for U in st.clifford_matrices(2, 1):
        for psi in (T, random_state(rng, 2, 1)):
            for a in (1.0, 2.0):
                inv = max(inv, abs(mg.magic_entropy(U @ psi @ U.conj().T, 1, a).value - mg.magic_entropy(psi, 1, a).value))
    mats = st.clifford_matrices(2, 2)
    psi = random_state(rng, 2, 2)
    base = mg.magic_entropy(psi).value
    for k in rng.choice(len(mats), size=c.count(100), replace=False):
        U = mats[k]
        inv = max(inv, abs(mg.magic_entropy(U @ psi @ U.conj().T).value - base))
    c.max_dev("clifford_invariance", inv, 1e-9)

    rng = c.rng()
    mono_n = mono_a = addv = le_mrm = 0.0
    for i in range(c.count(50)):
        psi = random_state(rng, 2, 1 + i % 2)
        vals = {(N, a): mg.magic_entropy(psi, N, a).value for N in (1, 2, 3, 4) for a in ALPHAS}
        for a in ALPHAS:
            mono_n = max(mono_n, max(vals[(N, a)] - vals[(N + 1, a)] for N in (1, 2, 3)))
        for N in (1, 2, 3):
            seq = [vals[(N, a)] for a in ALPHAS]
            mono_a = max(mono_a, max(b - a for a, b in zip(seq, seq[1:])))
        for a in (1.0, 2.0, np.inf):
            le_mrm = max(le_mrm, vals[(1, a)] - mg.mrm(psi, a).value)
        if i < c.count(20):
            phi = random_state(rng, 2, 1)
            for a in (1.0, 2.0):
                both = mg.magic_entropy(np.kron(psi, phi), 1, a).value
                addv = max(addv, abs(both - mg.magic_entropy(psi, 1, a).value - mg.magic_entropy(phi, 1, a).value))
    c.max_dev("monotone_in_N", mono_n, 1e-9)
    c.max_dev("anti_monotone_in_alpha", mono_a, 1e-9)
    c.max_dev("tensor_additivity", addv, 1e-9)
    c.max_dev("magic_entropy_below_mrm", le_mrm, 1e-9)
    approach = 1 - mg.binary_renyi(0.5 * (1 - 2.0**-12), 1)
    c.max_dev("magic_entropy_approaches_mrm_T", approach, 1e-3)

    rng = c.rng()
    dev = 0.0
    for _ in range(c.count(50)):
        rho = random_state(rng, 2, 1, "ginibre_mixed" if rng.random() < 0.7 else "haar_pure")
        for a in (1.0, 2.0, np.inf):
            dev = max(dev, abs(mg.mrm(rho, a).value - mg.mrm(rho, a, method="oracle").value))
    c.max_dev("mrm_closed_form_vs_oracle", dev, 1e-8)
    c.max_dev("mrm_T", abs(mg.mrm(T).value - 1), 1e-9)
    w3 = mg.mrm(lib.named_state("W", n=3), method="oracle").value
    w2 = mg.mrm(lib.named_state("W", n=2), method="oracle").value
    c.check("mrm_W_states_recorded", True, w3, 0.0,
            f"MRM(W2)={w2:.12g}, MRM(W3)={w3:.12g}; mean state of W3 has group {{I, ZZZ}}, so n-1 rather than n")

    rng = c.rng()
    worst = 0.0
    for _ in range(c.count(50)):
        rho = random_state(rng, 2, 2, "ginibre_mixed" if rng.random() < 0.5 else "haar_pure")
        for a in (1.0, np.inf):
            before = mg.mrm(rho, a).value
            after = 0.0
            for x in range(2):
                P = np.kron(np.eye(2), dm(np.eye(2)[x]))
                post = P @ rho @ P
                px = np.trace(post).real
                if px > 1e-12:
                    after += px * mg.mrm(post / px, a).value
            worst = max(worst, after - before)
    c.max_dev("mrm_measurement_monotone", worst, 1e-8)

    rng = c.rng()
    me_v = mrm_v = 0.0
    for _ in range(c.count(50)):
        n = 2
        psi = haar_vector(4, rng) if rng.random() < 0.5 else lib.named_vector("zero", n=n)
        circ = mg.random_clifford_t_circuit(rng, n, 10, 3)
        rep = mg.circuit_growth_check(psi, circ)
        me_v = max(me_v, rep.me_after - rep.me_before - 2 * rep.t_count)
        mrm_v = max(mrm_v, rep.mrm_after - rep.mrm_before - rep.t_count)
    c.max_dev("circuit_growth_me", me_v, 1e-9)
    c.max_dev("circuit_growth_mrm", mrm_v, 1e-9)

    dev = max(mg.magic_entropy_qudit(psi, 3).value for psi in st.enumerate_stabilizer_states(3, 1))
    c.max_dev("qudit_magic_zero_on_stabilizers", dev, 1e-9)
    rng = c.rng()
    low = np.inf
    addq = 0.0
    for _ in range(c.count(20)):
        a, b = random_state(rng, 3, 1), random_state(rng, 3, 1)
        va, vb = mg.magic_entropy_qudit(a, 3).value, mg.magic_entropy_qudit(b, 3).value
        low = min(low, va)
        addq = max(addq, abs(mg.magic_entropy_qudit(np.kron(a, b), 3).value - va - vb))
    c.check("qudit_magic_positive_off_stabilizers", low > 1e-6, low, 1e-6)
    c.max_dev("qudit_magic_additive", addq, 1e-9)

    c.max_dev("tsallis_magic_T", abs(mg.tsallis_magic(T, 1, 2).value - 0.375), 1e-12)


def suite_protocols(c: _Ctx) -> None:
    for (d, n) in [(2, 1), (2, 2), (3, 1)]:
        sw = pr.bound_sweep(d, n, c.count(200), int(c.rng().integers(2**31)))
        c.check(f"sandwich_lower_bound_{d}_{n}", sw.violations == 0, sw.violations, 0,
                f"fitted O(eps^2) constant {sw.fitted_C:.4g}")

    rep = pr.acceptance_probability_state(lib.t_vector())
    c.max_dev("p_accept_T", abs(rep.p_accept - 13 / 16), 1e-10)
    c.max_dev("epsilon_T", abs(rep.epsilon - (1 - 0.5 * (1 + 2**-0.5))), 1e-12)

    dev = max(abs(pr.acceptance_probability_gate(U).p_accept - 1) for U in st.clifford_matrices(2, 1))
    dev = max(dev, abs(pr.acceptance_probability_gate(lib.fourier(3), 3).p_accept - 1))
    c.max_dev("gate_test_cliffords_accept", dev, 1e-9)
    rt = pr.acceptance_probability_gate(lib.T)
    c.check("gate_test_T", rt.p_accept < 1 - 1e-3 and rt.lower_bound <= rt.p_accept + 1e-9, rt.p_accept, 1 - 1e-3)

    ok = True
    for d, n in [(2, 1), (2, 2), (3, 1)]:
        for v in st.stabilizer_vectors(d, n):
            ok &= abs(pr.acceptance_probability_state(v, d).p_accept - 1) < 1e-9
    rng = c.rng()
    gap = np.inf
    for i in range(c.count(100)):
        d, n = [(2, 1), (2, 2), (3, 1)][i % 3]
        gap = min(gap, 1 - pr.acceptance_probability_state(haar_vector(d**n, rng), d).p_accept)
    c.check("accept_one_iff_stabilizer", ok and gap >= 1e-6, gap, 1e-6)

    rng = c.rng()
    dev = 0.0
    for U in list(st.clifford_matrices(2, 1)[:6]) + [lib.T, random_unitary(2, rng)]:
        g = pr.acceptance_probability_gate(U).p_accept
        s = pr.acceptance_from_purity(pr.self_convolution_purity(ch.choi_of_unitary(U).choi, 2))
        dev = max(dev, abs(g - s))
    c.max_dev("gate_test_is_state_test_on_choi", dev, 0.0)

    rng = c.rng()
    dev = 0.0
    for _ in range(c.count(10)):
        v = haar_vector(2, rng)
        p = pr.acceptance_probability_state(v).p_accept
        for U in st.clifford_matrices(2, 1):
            dev = max(dev, abs(pr.acceptance_probability_state(U @ v).p_accept - p))
    c.max_dev("p_accept_clifford_invariant", dev, 1e-10)

    rng = c.rng()
    worst = 0.0
    for _ in range(c.count(20)):
        v = st.stabilizer_vectors(2, 1)[int(rng.integers(6))] + 1e-6 * haar_vector(2, rng)
        worst = max(worst, 1 - pr.acceptance_probability_state(v / np.linalg.norm(v)).p_accept)
    c.max_dev("continuity_at_zero_epsilon", worst, 1e-5)

    outside = 0
    seeds = c.count(20)
    for k in range(seeds):
        res = pr.swap_test_sample(13 / 16, 100_000, c.seed, k)
        se = np.sqrt(13 / 16 * 3 / 16 / 100_000)
        outside += abs(res["empirical_rate"] - 13 / 16) > 3 * se
    c.check("swap_sampling_within_3_stderr", outside <= 3, outside, 3, f"{outside} of {seeds} seeds outside")

    rng = c.rng()
    dev = 0.0
    for i in range(c.count(20)):
        n = 1 + i % 2
        r, s = random_state(rng, 2, n, "ginibre_mixed"), random_state(rng, 2, n, "ginibre_mixed")
        dev = max(dev, abs(pr.swap_circuit_oracle(r, s) - 0.5 * (1 + np.trace(r @ s).real)))
    c.max_dev("swap_circuit_oracle", dev, 1e-10)


SUITES = {
    "pauli": suite_pauli,
    "states": suite_states,
    "stabilizer": suite_stabilizer,
    "convolution": suite_convolution,
    "clt": suite_clt,
    "channels": suite_channels,
    "magic": suite_magic,
    "protocols": suite_protocols,
}


def _run_one(args) -> list[PropertyResult]:
    name, seed, trials = args
    index = list(SUITES).index(name)
    ctx = _Ctx(name, index, seed, trials)
    try:
        SUITES[name](ctx)
    except Exception as exc:  # a crashing suite is a failed property, not a crash of the runner
        logger.exception("suite %s raised", name)
        ctx.results.append(PropertyResult(name, "suite_completed", False, float("nan"), 0.0, repr(exc)))
    return ctx.results


def run_suites(only=None, seed: int = 0, trials: int | None = None, parallel: bool = False) -> list[PropertyResult]:
    names = list(SUITES) if not only else list(only)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    jobs = [(n, seed, trials) for n in names]
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as ex:
            chunks = list(ex.map(_run_one, jobs))
    else:
        chunks = [_run_one(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]
