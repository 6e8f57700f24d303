"""Magic measures built on self-convolution: magic entropy, its Renyi and
Tsallis variants, the magic spectrum, Renyi relative entropy and the
relative-entropy-of-magic against minimal stabilizer-projection states (MRM).

All values are in bits except the Tsallis variant.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import library as lib
from .channels import ChannelHandle
from .convolution import convolve_hadamard, convolve_qubit
from .errors import NotCliffordError, UnsupportedError, ValidationError
from .pauli import check_prime, num_subsystems
from .stabilizer import UNIT_TOL, mean_state, msps_enumerate, symplectic_of_clifford
from .states import dm, is_pure, renyi_entropy, spectrum, tsallis_entropy

SUPPORT_TOL = 1e-10
PURE_TOL = 1e-9


@dataclass
class MagicReport:
    measure: str
    params: dict
    value: float
    spectrum: list | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "params": self.params,
            "value": self.value,
            "spectrum": self.spectrum,
            "metadata": self.metadata,
        }


def binary_renyi(p: float, alpha: float) -> float:
    """h_alpha(p) in bits."""
    return renyi_entropy(np.array([1 - p, p]), alpha)


def _as_pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim == 1:
        return dm(psi)
    if not is_pure(psi, PURE_TOL):
        raise ValidationError("magic entropy is defined for pure states; input is mixed")
    return psi


def _check_N(N: int) -> int:
    if int(N) != N or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N}")
    return int(N)


def magic_spectrum(psi, N: int = 1) -> np.ndarray:
    rho = _as_pure_state(psi)
    K = 2 * _check_N(N) + 1
    return spectrum(convolve_qubit([rho] * K))


def magic_entropy(psi, N: int = 1, alpha: float = 1.0) -> MagicReport:
    """ME^{(N)}_alpha(psi) = S_alpha of the (2N+1)-fold self-convolution of a pure qubit state."""
    rho = _as_pure_state(psi)
    num_subsystems(rho.shape[0], 2)
    spec = magic_spectrum(rho, N)
    return MagicReport(
        "magic_entropy",
        {"N": int(N), "alpha": float(alpha), "d": 2},
        renyi_entropy(spec, alpha),
        spec.tolist(),
        {"method": "char_duality", "log_base": 2},
    )


def magic_entropy_qudit(psi, d: int, alpha: float = 1.0) -> MagicReport:
    """S_alpha(psi [H] psi) for an odd prime local dimension."""
    check_prime(d)
    if d == 2:
        raise ValidationError("use magic_entropy for qubits")
    rho = _as_pure_state(psi)
    num_subsystems(rho.shape[0], d)
    spec = spectrum(convolve_hadamard(rho, rho, d))
    return MagicReport(
        "magic_entropy_qudit",
        {"alpha": float(alpha), "d": d},
        renyi_entropy(spec, alpha),
        spec.tolist(),
        {"method": "char_duality", "log_base": 2},
    )


def tsallis_magic(psi, N: int = 1, alpha: float = 2.0) -> MagicReport:
    if alpha < 1:
        raise ValidationError("Tsallis magic needs alpha >= 1")
    spec = magic_spectrum(psi, N)
    return MagicReport(
        "tsallis_magic",
        {"N": int(N), "alpha": float(alpha), "d": 2},
        tsallis_entropy(spec, alpha),
        spec.tolist(),
        {"method": "char_duality"},
    )


def _support_split(sigma, tol: float = SUPPORT_TOL):
    w, v = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    keep = w > tol
    return w[keep], v[:, keep]


def renyi_relative_entropy(rho, sigma, alpha: float) -> float:
    """Sandwiched Renyi relative entropy D_alpha(rho || sigma) in bits, alpha in [1/2, inf].

    Returns +inf when the support of rho is not inside that of sigma
    (for alpha < 1 only when rho and sigma are orthogonal).
    """
    if alpha < 0.5:
        raise ValidationError("alpha must be >= 1/2")
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    s, v = _support_split(sigma)
    r = v.conj().T @ rho @ v  # rho compressed to supp(sigma)
    inside = np.trace(r).real
    if alpha >= 1 and np.trace(rho).real - inside > SUPPORT_TOL:
        return float("inf")
    if alpha == 1:
        lr = spectrum(rho)
        lr = lr[lr > 0]
        neg_ent = float((lr * np.log2(lr)).sum())
        cross = float(np.einsum("ij,ji->", r, np.diag(np.log2(s))).real)
        return neg_ent - cross + 0.0
    if np.isinf(alpha):
        m = (r / np.sqrt(s)[:, None]) / np.sqrt(s)[None, :]
        return float(np.log2(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).max())) + 0.0
    g = s ** ((1 - alpha) / (2 * alpha))
    m = g[:, None] * r * g[None, :]
    w = np.clip(np.linalg.eigvalsh(0.5 * (m + m.conj().T)), 0, None)
    q = float((w**alpha).sum())
    if q <= 0:
        return float("inf")
    return float(np.log2(q) / (alpha - 1)) + 0.0


def mrm(rho, alpha: float = 1.0, d: int = 2, method: str = "closed_form",
        unit_tol: float = UNIT_TOL) -> MagicReport:
    """min over MSPS sigma of D_alpha(rho || sigma).

    ``closed_form`` evaluates S_alpha(M(rho)) - S_alpha(rho); ``oracle`` scans
    every enumerated MSPS (small (d, n) only).
    """
    if alpha < 1:
        raise ValidationError("MRM is defined here for alpha >= 1")
    rho = np.asarray(rho, dtype=complex)
    n = num_subsystems(rho.shape[0], d)
    meta = {"method": method, "log_base": 2}
    if method == "closed_form":
        ms = mean_state(rho, d, unit_tol)
        value = renyi_entropy(ms.rho, alpha) - renyi_entropy(rho, alpha)
        meta["mean_state_group_order"] = ms.support_group.order
    elif method == "oracle":
        cands = msps_enumerate(d, n)
        vals = [renyi_relative_entropy(rho, s, alpha) for s in cands]
        k = int(np.argmin(vals))
        value = vals[k]
        meta["msps_count"] = len(cands)
        meta["argmin"] = k
    else:
        raise ValidationError(f"unknown MRM method {method!r}")
    return MagicReport("mrm", {"alpha": float(alpha), "d": d, "n": n}, float(value) + 0.0, None, meta)


def channel_magic_entropy(h: ChannelHandle, N: int = 1, alpha: float = 1.0) -> MagicReport:
    """Magic entropy of the Choi state; a mixed Choi state falls back to S_alpha of its self-convolution."""
    if h.d != 2:
        raise UnsupportedError("channel magic entropy is implemented for qubit channels")
    if is_pure(h.choi, PURE_TOL):
        rep = magic_entropy(h.choi, N, alpha)
        rep.measure = "channel_magic_entropy"
        return rep
    K = 2 * _check_N(N) + 1
    spec = spectrum(convolve_qubit([h.choi] * K))
    return MagicReport(
        "channel_magic_entropy",
        {"N": int(N), "alpha": float(alpha), "d": 2},
        renyi_entropy(spec, alpha),
        spec.tolist(),
        {"method": "char_duality", "mixed_choi_fallback": True},
    )


_CLIFFORD_NAMES = {"I", "X", "Y", "Z", "H", "S", "CNOT", "CZ"}
_NON_CLIFFORD_NAMES = {"T", "sqrtT"}


def _gate_matrix(gate):
    if isinstance(gate, str):
        return lib.named_gate(gate), gate
    return np.asarray(gate, dtype=complex), None


def _is_clifford(U) -> bool:
    try:
        symplectic_of_clifford(U, 2)
    except NotCliffordError:
        return False
    return True


@dataclass
class GrowthReport:
    t_count: int
    me_before: float
    me_after: float
    mrm_before: float
    mrm_after: float
    me_bound_holds: bool
    mrm_bound_holds: bool


def apply_circuit(psi, circuit, n: int) -> tuple[np.ndarray, int]:
    """Apply (gate, qubits) pairs to a state vector; return the result and the count of
    non-Clifford single-qubit gates."""
    v = np.asarray(psi, dtype=complex).copy()
    t = 0
    for gate, qubits in circuit:
        U, name = _gate_matrix(gate)
        qubits = list(qubits)
        if U.shape[0] != 2 ** len(qubits):
            raise ValidationError("gate size does not match its qubit list")
        if name is not None and name not in _CLIFFORD_NAMES | _NON_CLIFFORD_NAMES:
            raise UnsupportedError(f"unsupported gate {name!r}")
        clifford = name in _CLIFFORD_NAMES if name is not None else _is_clifford(U)
        if not clifford:
            if len(qubits) != 1:
                raise UnsupportedError("non-Clifford gates must act on one qubit")
            t += 1
        v = lib.embed(U, qubits, n) @ v
    return v, t


def circuit_growth_check(psi, circuit, alpha: float = 1.0, tol: float = 1e-9) -> GrowthReport:
    """ME(C psi C^dag) <= ME(psi) + 2t and MRM(C psi C^dag) <= MRM(psi) + t."""
    psi = np.asarray(psi, dtype=complex)
    n = num_subsystems(psi.size, 2)
    out, t = apply_circuit(psi, circuit, n)
    rho0, rho1 = dm(psi), dm(out)
    me0 = magic_entropy(rho0, 1, alpha).value
    me1 = magic_entropy(rho1, 1, alpha).value
    m0 = mrm(rho0, alpha).value
    m1 = mrm(rho1, alpha).value
    return GrowthReport(t, me0, me1, m0, m1, me1 <= me0 + 2 * t + tol, m1 <= m0 + t + tol)


def random_clifford_t_circuit(rng: np.random.Generator, n: int, length: int = 10, max_t: int = 3):
    """Random circuit over {H, S, CNOT, T} with at most ``max_t`` T gates."""
    circuit = []
    t = 0
    for _ in range(length):
        choices = ["H", "S"] + (["CNOT"] if n > 1 else []) + (["T"] if t < max_t else [])
        g = choices[int(rng.integers(len(choices)))]
        if g == "CNOT":
            a, b = rng.choice(n, size=2, replace=False)
            circuit.append((g, (int(a), int(b))))
        else:
            circuit.append((g, (int(rng.integers(n)),)))
            t += g == "T"
    return circuit
