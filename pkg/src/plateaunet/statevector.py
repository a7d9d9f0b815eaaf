"""Dense pure-state simulator.

Qubit ``j`` is bit ``j`` (least significant) of the amplitude index, so
``|q_{n-1} ... q_1 q_0>`` lives at index ``sum(q_j << j)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ShapeError, ValidationError

MAX_QUBITS = 14

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI = {"X": X, "Y": Y, "Z": Z}


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] != 2**self.n_qubits:
            raise ShapeError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = int(round(np.log2(amps.shape[0]))) if amps.size else -1
        if n < 0 or 2**n != amps.shape[0]:
            raise ShapeError(f"amplitude count {amps.shape[0]} is not a power of two")
        return cls(amps, n)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _check_qubit_count(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ConfigurationError(f"qubit count must be in [1, {MAX_QUBITS}], got {n!r}")


def _check_index(state: StateVector, q: int, what: str = "qubit") -> None:
    if not 0 <= q < state.n_qubits:
        raise IndexError(f"{what} index {q} out of range for {state.n_qubits} qubits")


def zero_state(n: int) -> StateVector:
    _check_qubit_count(n)
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, n)


def basis_state(n: int, index: int) -> StateVector:
    _check_qubit_count(n)
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, n)


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    """Return ``exp(-i theta sigma / 2)`` for ``sigma`` in {X, Y, Z}."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if axis == "Y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == "X":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "Z":
        return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)
    raise ConfigurationError(f"unknown rotation axis {axis!r}")


def is_unitary(m: np.ndarray, atol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=atol)


def apply_single_qubit(state: StateVector, gate: np.ndarray, target: int) -> StateVector:
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ShapeError(f"single-qubit gate must be 2x2, got {gate.shape}")
    if not is_unitary(gate):
        raise ValidationError("gate is not unitary within 1e-12")
    _check_index(state, target, "target")
    n = state.n_qubits
    v = state.amplitudes.reshape(2 ** (n - 1 - target), 2, 2**target)
    out = np.einsum("ab,hbl->hal", gate, v)
    return StateVector(out.reshape(-1), n)


def apply_ry(state: StateVector, theta: float, target: int) -> StateVector:
    return apply_single_qubit(state, rotation_matrix("Y", theta), target)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_index(state, control, "control")
    _check_index(state, target, "target")
    if control == target:
        raise IndexError("control and target must differ")
    idx = np.arange(state.dim)
    src = idx ^ (((idx >> control) & 1) << target)
    return StateVector(state.amplitudes[src], state.n_qubits)


def prob_zero(state: StateVector, qubit: int) -> float:
    _check_index(state, qubit)
    n = state.n_qubits
    p = state.probabilities().reshape(2 ** (n - 1 - qubit), 2, 2**qubit)
    return float(p[:, 0, :].sum())


def norm_of_difference(a: StateVector, b: StateVector) -> float:
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def check_hermitian(h: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ShapeError(f"operator must be square, got {h.shape}")
    if not np.allclose(h, h.conj().T, atol=atol):
        raise ValidationError("operator is not Hermitian within 1e-10")
    return h


def expectation(state: StateVector, h: np.ndarray) -> float:
    """<psi|H|psi> for a dense Hermitian ``H`` (n <= 8)."""
    h = check_hermitian(h)
    if h.shape[0] != state.dim:
        raise ShapeError(f"operator dimension {h.shape[0]} != state dimension {state.dim}")
    if state.n_qubits > 8:
        raise ConfigurationError("dense expectation is limited to n <= 8")
    psi = state.amplitudes
    val = np.vdot(psi, h @ psi)
    if abs(val.imag) >= 1e-10:
        raise ValidationError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def embed_single(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Dense ``op_qubit (x) I_rest`` under the LSB-first ordering."""
    return np.kron(np.kron(np.eye(2 ** (n - 1 - qubit)), op), np.eye(2**qubit))
