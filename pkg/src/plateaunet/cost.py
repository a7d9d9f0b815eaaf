"""Cost functions: the local training cost and general observable costs."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .statevector import StateVector, embed_single, expectation, prob_zero


def local_cost(state: StateVector) -> float:
    """``1 - mean_i P(qubit i = 0)``."""
    n = state.n_qubits
    return 1.0 - sum(prob_zero(state, i) for i in range(n)) / n


@lru_cache(maxsize=None)
def _zero_bit_counts(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    ones = sum((idx >> j) & 1 for j in range(n))
    counts = (n - ones).astype(float)
    counts.setflags(write=False)
    return counts


def local_cost_batch(amplitudes: np.ndarray, n: int) -> np.ndarray:
    """Local cost of every row of a (B, 2**n) amplitude array.

    ``sum_i P(q_i = 0)`` equals the expected number of zero bits, so the whole
    cost is one weighted sum over basis probabilities.
    """
    p = np.abs(amplitudes) ** 2 if np.iscomplexobj(amplitudes) else amplitudes * amplitudes
    return 1.0 - (p @ _zero_bit_counts(n)) / n


def local_cost_observable(n: int) -> np.ndarray:
    """Dense ``I - (1/n) sum_i |0><0|_i (x) I``; diagnostic use, n <= 8."""
    proj0 = np.array([[1, 0], [0, 0]], dtype=complex)
    h = np.eye(2**n, dtype=complex)
    for i in range(n):
        h -= embed_single(proj0, i, n) / n
    return h


def observable_cost(state: StateVector, h: np.ndarray) -> float:
    return expectation(state, h)


def dataset_cost(states: list, observables: list) -> float:
    """Mean of ``<psi_i|H_i|psi_i>`` over paired samples."""
    if len(states) == 0 or len(states) != len(observables):
        raise ValidationError("need equal-length, nonempty state and observable lists")
    return float(np.mean([observable_cost(s, h) for s, h in zip(states, observables)]))


def projector(state: StateVector) -> np.ndarray:
    """``|y><y|`` for a target state ``y``."""
    return np.outer(state.amplitudes, state.amplitudes.conj())
