"""Layered rotation + entangler parameterisation.

Layer ``i`` applies ``R_axis(theta[i*n + j])`` to every qubit ``j`` and then
the entangler; layer 0 acts on the state first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, ShapeError
from .statevector import (
    StateVector,
    apply_cnot,
    apply_single_qubit,
    rotation_matrix,
    _check_qubit_count,
)

LADDER = "linear-cnot-ladder"
RING = "ring-cnot-ladder"
NO_ENTANGLER = "none"
ENTANGLERS = (LADDER, RING, NO_ENTANGLER)
AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    depth_L: int
    rotation_axis: str = "Y"
    entangler: str = LADDER

    def __post_init__(self):
        _check_qubit_count(self.n_qubits)
        if not isinstance(self.depth_L, (int, np.integer)) or self.depth_L < 1:
            raise ConfigurationError(f"depth must be a positive integer, got {self.depth_L!r}")
        if self.rotation_axis not in AXES:
            raise ConfigurationError(f"rotation axis must be one of {AXES}, got {self.rotation_axis!r}")
        if self.entangler not in ENTANGLERS:
            raise ConfigurationError(f"unknown entangler layout {self.entangler!r}")

    @property
    def param_count(self) -> int:
        return self.n_qubits * self.depth_L

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "depth_L": self.depth_L,
            "rotation_axis": self.rotation_axis,
            "entangler": self.entangler,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnsatzSpec":
        return cls(int(d["n_qubits"]), int(d["depth_L"]),
                   d.get("rotation_axis", "Y"), d.get("entangler", LADDER))


def param_count(spec: AnsatzSpec) -> int:
    return spec.param_count


def entangler_pairs(spec: AnsatzSpec) -> list[tuple[int, int]]:
    """(control, target) pairs of one entangling block, in application order."""
    n = spec.n_qubits
    if spec.entangler == NO_ENTANGLER or n == 1:
        return []
    pairs = [(j, j + 1) for j in range(n - 1)]
    if spec.entangler == RING and n > 2:
        pairs.append((n - 1, 0))
    return pairs


def _check_theta(spec: AnsatzSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1:] != (spec.param_count,):
        raise ShapeError(f"expected {spec.param_count} parameters, got shape {theta.shape}")
    return theta


def apply_entangler(state: StateVector, spec: AnsatzSpec) -> StateVector:
    for c, t in entangler_pairs(spec):
        state = apply_cnot(state, c, t)
    return state


def apply_ansatz(state: StateVector, spec: AnsatzSpec, theta) -> StateVector:
    """Gate-by-gate reference application of ``U(theta)``."""
    if state.n_qubits != spec.n_qubits:
        raise ShapeError(f"state has {state.n_qubits} qubits, spec has {spec.n_qubits}")
    theta = _check_theta(spec, theta)
    n = spec.n_qubits
    for i in range(spec.depth_L):
        for j in range(n):
            state = apply_single_qubit(state, rotation_matrix(spec.rotation_axis, theta[i * n + j]), j)
        state = apply_entangler(state, spec)
    return state


def build_unitary(spec: AnsatzSpec, theta) -> np.ndarray:
    """Dense ``U(theta)`` (n <= 6); column ``k`` is the image of basis state ``k``."""
    if spec.n_qubits > 6:
        raise ConfigurationError("dense unitary construction is limited to n <= 6")
    theta = _check_theta(spec, theta)
    d = 2**spec.n_qubits
    cols = simulate_batch(np.eye(d), spec, np.broadcast_to(theta, (d, theta.size)))
    return cols.T.astype(np.complex128)


# -- batched engine -----------------------------------------------------------


@lru_cache(maxsize=None)
def entangler_permutation(spec: AnsatzSpec) -> np.ndarray:
    """Gather index ``g`` with ``W|psi> = psi[g]`` for the (permutation) entangler."""
    g = np.arange(2**spec.n_qubits)
    for c, t in entangler_pairs(spec):
        idx = np.arange(g.size)
        g = g[idx ^ (((idx >> c) & 1) << t)]
    g.setflags(write=False)
    return g


def _rotate(v: np.ndarray, axis: str, theta: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Rotate qubit ``qubit`` of every row of ``v`` (shape (B, 2**n)) by its own angle."""
    b = v.shape[0]
    w = v.reshape(b, 2 ** (n - 1 - qubit), 2, 2**qubit)
    a0, a1 = w[:, :, 0, :], w[:, :, 1, :]
    half = 0.5 * theta[:, None, None]
    out = np.empty_like(w)
    if axis == "Y":
        c, s = np.cos(half), np.sin(half)
        out[:, :, 0, :] = c * a0 - s * a1
        out[:, :, 1, :] = s * a0 + c * a1
    elif axis == "X":
        c, s = np.cos(half), -1j * np.sin(half)
        out[:, :, 0, :] = c * a0 + s * a1
        out[:, :, 1, :] = s * a0 + c * a1
    else:
        ph = np.exp(-1j * half)
        out[:, :, 0, :] = ph * a0
        out[:, :, 1, :] = ph.conj() * a1
    return out.reshape(b, -1)


def simulate_batch(states: np.ndarray, spec: AnsatzSpec, thetas: np.ndarray) -> np.ndarray:
    """Apply ``U(thetas[b])`` to ``states[b]`` for every row ``b``.

    ``states`` is (B, 2**n) or a single (2**n,) vector shared by all rows.
    Real input with a Y-axis ansatz is kept in float64, which is exact since
    every gate involved is real.
    """
    thetas = _check_theta(spec, np.atleast_2d(thetas))
    n = spec.n_qubits
    b = thetas.shape[0]
    states = np.asarray(states)
    real = spec.rotation_axis == "Y" and not np.any(np.imag(states))
    dtype = np.float64 if real else np.complex128
    if states.ndim == 1:
        v = np.broadcast_to(np.real(states) if real else states, (b, states.size)).astype(dtype)
    else:
        if states.shape[0] != b:
            raise ShapeError(f"{states.shape[0]} states for {b} parameter rows")
        v = (np.real(states) if real else states).astype(dtype, copy=True)
    if v.shape[1] != 2**n:
        raise ShapeError(f"state dimension {v.shape[1]} != {2**n}")
    perm = entangler_permutation(spec)
    has_ent = bool(entangler_pairs(spec))
    for i in range(spec.depth_L):
        for j in range(n):
            v = _rotate(v, spec.rotation_axis, thetas[:, i * n + j], j, n)
        if has_ent:
            v = v[:, perm]
    return v
