"""Named states and gates used across the toolkit and the CLI."""
from __future__ import annotations

import numpy as np

from .errors import UnsupportedError, ValidationError
from .states import dm, kron_all, pure_vector

SQ2 = np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / SQ2
S = np.diag([1, 1j]).astype(complex)
T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex)
SQRT_T = np.diag([1, np.exp(1j * np.pi / 8)]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def fourier(d: int) -> np.ndarray:
    k = np.arange(d)
    return np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


def qudit_phase_gate(d: int) -> np.ndarray:
    """diag(omega^{k(k-1)/2}); for d = 3 this is diag(1, 1, omega)."""
    k = np.arange(d)
    return np.diag(np.exp(2j * np.pi * ((k * (k - 1) // 2) % d) / d))


def qudit_x(d: int) -> np.ndarray:
    return np.roll(np.eye(d), 1, axis=0).astype(complex)


def qudit_z(d: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def t_vector() -> np.ndarray:
    return np.array([1, np.exp(1j * np.pi / 4)]) / SQ2


def h_vector() -> np.ndarray:
    rho = 0.5 * (I2 + (X + Y + Z) / np.sqrt(3))
    return pure_vector(rho)


def w_vector(n: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    for i in range(n):
        v[1 << i] = 1
    return v / np.sqrt(n)


def bell_vector(d: int = 2) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[[k * d + k for k in range(d)]] = 1
    return v / np.sqrt(d)


def named_vector(name: str, d: int = 2, n: int = 1) -> np.ndarray:
    """Pure state vector for one of zero, plus, T, H, W, bell."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if name == "zero":
        v = np.zeros(d**n, dtype=complex)
        v[0] = 1
        return v
    if name == "plus":
        return np.full(d**n, d ** (-n / 2), dtype=complex)
    if name in ("T", "H"):
        if d != 2:
            raise UnsupportedError(f"{name} state is a qubit state")
        one = t_vector() if name == "T" else h_vector()
        return kron_all(*([one] * n))
    if name == "W":
        if d != 2:
            raise UnsupportedError("W state is a qubit state")
        return w_vector(n)
    if name == "bell":
        if n % 2:
            raise ValidationError("bell needs an even number of subsystems")
        return kron_all(*([bell_vector(d)] * (n // 2)))
    raise ValidationError(f"unknown named state {name!r}")


def named_state(name: str, d: int = 2, n: int = 1) -> np.ndarray:
    return dm(named_vector(name, d, n))


def named_gate(name: str, d: int = 2) -> np.ndarray:
    qubit = {
        "I": I2, "X": X, "Y": Y, "Z": Z, "H": H, "S": S, "T": T,
        "sqrtT": SQRT_T, "CNOT": CNOT, "CZ": CZ,
    }
    if d == 2 and name in qubit:
        return qubit[name].copy()
    if name == "F" or (d > 2 and name == "H"):
        return fourier(d)
    if d > 2 and name == "S":
        return qudit_phase_gate(d)
    if d > 2 and name == "X":
        return qudit_x(d)
    if d > 2 and name == "Z":
        return qudit_z(d)
    if d > 2 and name == "I":
        return np.eye(d, dtype=complex)
    raise ValidationError(f"unknown gate {name!r} for d={d}")


def embed(gate: np.ndarray, targets, n: int, d: int = 2) -> np.ndarray:
    """Lift a gate on ``targets`` (in the gate's own factor order) to n subsystems."""
    targets = list(targets)
    k = len(targets)
    rest = [i for i in range(n) if i not in targets]
    full = np.kron(gate, np.eye(d ** (n - k)))
    order = targets + rest  # factor order of ``full``
    inv = [order.index(i) for i in range(n)]
    dims = [d] * n
    t = full.reshape(dims + dims).transpose(inv + [n + i for i in inv])
    return t.reshape(d**n, d**n)
