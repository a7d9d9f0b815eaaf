"""Parameter-shift and finite-difference gradients, plus the hybrid chain rule."""
from __future__ import annotations

import numpy as np

from .ansatz import AnsatzSpec, simulate_batch
from .cost import local_cost_batch
from .errors import ShapeError, ValidationError
from .mlp import MlpGradients, MlpModel, backward, forward
from .statevector import StateVector, check_hermitian

SHIFT = np.pi / 2


class CircuitEvaluator:
    """``theta -> C(U(theta)|input>)`` with an evaluation counter.

    ``cost`` is ``"local"`` or a dense Hermitian matrix. Every row passed to
    :meth:`batch` counts as one cost evaluation.
    """

    def __init__(self, input_state: StateVector, spec: AnsatzSpec, cost="local"):
        if input_state.n_qubits != spec.n_qubits:
            raise ShapeError("input state and ansatz disagree on qubit count")
        self.spec = spec
        self.input = input_state.amplitudes
        if isinstance(cost, str):
            if cost != "local":
                raise ValueError(f"unknown cost kind {cost!r}")
            self.observable = None
        else:
            self.observable = check_hermitian(cost)
            if self.observable.shape[0] != 2**spec.n_qubits:
                raise ShapeError("observable dimension does not match the circuit")
        self.n_evals = 0

    @property
    def n_params(self) -> int:
        return self.spec.param_count

    def batch(self, thetas) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        self.n_evals += thetas.shape[0]
        out = simulate_batch(self.input, self.spec, thetas)
        if self.observable is None:
            return local_cost_batch(out, self.spec.n_qubits)
        vals = np.einsum("bi,ij,bj->b", out.conj(), self.observable, out)
        if np.any(np.abs(vals.imag) >= 1e-10):
            raise ValidationError("observable expectation has an imaginary part")
        return vals.real

    def __call__(self, theta) -> float:
        return float(self.batch(np.asarray(theta, dtype=float)[None, :])[0])


def _batch_eval(evaluator, thetas: np.ndarray) -> np.ndarray:
    if hasattr(evaluator, "batch"):
        return np.asarray(evaluator.batch(thetas), dtype=float)
    return np.array([evaluator(t) for t in thetas], dtype=float)


def param_shift_grad(evaluator, theta, indices=None) -> np.ndarray:
    """``[C(theta + pi/2 e_k) - C(theta - pi/2 e_k)] / 2`` for every ``k``.

    All shifted points go through the evaluator in one batch (2p rows, plus
    first, minus second); ``indices`` restricts the derivative to a subset.
    """
    theta = np.asarray(theta, dtype=float)
    ks = np.arange(theta.size) if indices is None else np.atleast_1d(indices)
    m = ks.size
    shifted = np.tile(theta, (2 * m, 1))
    shifted[np.arange(m), ks] += SHIFT
    shifted[m + np.arange(m), ks] -= SHIFT
    vals = _batch_eval(evaluator, shifted)
    return 0.5 * (vals[:m] - vals[m:])


def finite_diff_grad(evaluator, theta, step: float = 1e-5) -> np.ndarray:
    """Central differences; a test oracle independent of the shift rule."""
    if step <= 0:
        raise ValueError("step must be positive")
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    grad = np.empty(p)
    for k in range(p):
        e = np.zeros(p)
        e[k] = step
        grad[k] = (evaluator(theta + e) - evaluator(theta - e)) / (2 * step)
    return grad


def shift_grad_and_cost(evaluator, theta) -> tuple[np.ndarray, float]:
    """Gradient and ``C(theta)`` from one batch of ``2p + 1`` evaluations."""
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    rows = np.tile(theta, (2 * p + 1, 1))
    rows[np.arange(p), np.arange(p)] += SHIFT
    rows[p + np.arange(p), np.arange(p)] -= SHIFT
    vals = _batch_eval(evaluator, rows)
    return 0.5 * (vals[:p] - vals[p : 2 * p]), float(vals[2 * p])


def hybrid_grad(model: MlpModel, alpha, evaluator) -> tuple[MlpGradients, np.ndarray, float]:
    """Network gradients of ``C(theta(phi, alpha))``: quantum part by shift rule, classical by backprop."""
    if model.arch.output_dim != evaluator.n_params:
        raise ShapeError(
            f"network emits {model.arch.output_dim} angles but the circuit has {evaluator.n_params}"
        )
    theta, cache = forward(model, alpha)
    upstream, cost = shift_grad_and_cost(evaluator, theta)
    return backward(model, cache, upstream), theta, cost
