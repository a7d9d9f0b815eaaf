"""Barren-plateau diagnostics.

Haar-moment Monte Carlo checks, the zero-mean gradient property in
commutator form, gradient-variance scans over the ansatz, and the
identity-proximity metric ``mu = ||U(theta)|phi> - |phi>||``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from functools import reduce

import numpy as np

from .ansatz import AnsatzSpec, apply_ansatz, entangler_permutation, param_count
from .encoding import pi4_input, qubit_encode
from .errors import ConfigurationError, ShapeError
from .gradients import CircuitEvaluator, param_shift_grad
from .mlp import MODEL_KINDS, forward
from .statevector import PAULI, StateVector, check_hermitian, embed_single, norm_of_difference, rotation_matrix, zero_state
from .trainer import TrainConfig, depth_for, initial_hybrid, initial_theta

_CHUNK = 20000


# -- Haar sampling -------------------------------------------------------------


def haar_unitaries(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-random d x d unitaries, shape (count, d, d).

    QR of a complex Ginibre matrix, with the phases of ``diag(R)`` pushed
    into ``Q`` so the distribution is exactly Haar.
    """
    if not 2 <= d <= 64:
        raise ConfigurationError(f"dimension must be in [2, 64], got {d}")
    z = (rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return haar_unitaries(d, 1, rng)[0]


def _chunks(n: int):
    for start in range(0, n, _CHUNK):
        yield min(_CHUNK, n - start)


# -- moment formulas ------------------------------------------------------------


def _tr(m) -> complex:
    return complex(np.trace(m))


def lemma1_value(a, b) -> complex:
    d = a.shape[0]
    return _tr(a) * _tr(b) / d


def lemma2_value(a, b, c, d_op) -> complex:
    """Haar average of ``Tr[W A W^+ B W C W^+ D]``."""
    d = a.shape[0]
    ta, tb, tc, td = _tr(a), _tr(b), _tr(c), _tr(d_op)
    tac, tbd = _tr(a @ c), _tr(b @ d_op)
    return (ta * tc * tbd + tac * tb * td) / (d**2 - 1) - (tac * tbd + ta * tb * tc * td) / (d * (d**2 - 1))


def lemma3_value(a, b, c, d_op) -> complex:
    """Haar average of ``Tr[W A W^+ B] Tr[W C W^+ D]``."""
    d = a.shape[0]
    ta, tb, tc, td = _tr(a), _tr(b), _tr(c), _tr(d_op)
    tac, tbd = _tr(a @ c), _tr(b @ d_op)
    return (ta * tb * tc * td + tac * tbd) / (d**2 - 1) - (tac * tb * td + ta * tc * tbd) / (d * (d**2 - 1))


@dataclass
class LemmaCheckReport:
    lemma: int
    dim: int
    samples: int
    estimate: complex
    analytic: complex
    stderr: float
    label: str = ""

    @property
    def abs_error(self) -> float:
        return abs(self.estimate - self.analytic)

    @property
    def rel_error(self) -> float:
        return self.abs_error / abs(self.analytic) if abs(self.analytic) > 0 else float("inf") if self.abs_error else 0.0

    @property
    def z_score(self) -> float:
        return self.abs_error / self.stderr if self.stderr > 0 else (0.0 if self.exact else float("inf"))

    @property
    def exact(self) -> bool:
        """True when every sample is the same number (up to rounding)."""
        return self.stderr <= 1e-12 * max(1.0, abs(self.analytic))

    def within(self, k: float = 3.0) -> bool:
        if self.exact:
            return self.abs_error <= 1e-9 * max(1.0, abs(self.analytic))
        return self.abs_error <= k * self.stderr

    def as_row(self) -> dict:
        return {
            "lemma": self.lemma, "label": self.label, "dim": self.dim, "samples": self.samples,
            "estimate_re": self.estimate.real, "estimate_im": self.estimate.imag,
            "analytic": self.analytic.real, "abs_error": self.abs_error,
            "stderr": self.stderr, "z_score": self.z_score, "within_3se": self.within(),
        }


def _complex_stats(vals: np.ndarray) -> tuple[complex, float]:
    """Mean and its standard error, ``sqrt(E|X - mean|^2 / N)``."""
    mean = complex(vals.mean())
    spread = np.sum(np.abs(vals - mean) ** 2) / max(vals.size - 1, 1)
    return mean, float(np.sqrt(spread / vals.size))


def _check_ops(d: int, *ops):
    out = []
    for op in ops:
        op = np.asarray(op, dtype=complex)
        if op.shape != (d, d):
            raise ShapeError(f"operator shape {op.shape} does not match dimension {d}")
        out.append(op)
    return out


def _sample_lemma(kind: int, ops, d: int, n_samples: int, rng) -> np.ndarray:
    vals = []
    for m in _chunks(n_samples):
        w = haar_unitaries(d, m, rng)
        wh = np.conj(np.swapaxes(w, 1, 2))
        x = w @ ops[0] @ wh  # W A W^+
        if kind == 1:
            vals.append(np.einsum("nij,ji->n", x, ops[1]))
            continue
        y = w @ ops[2] @ wh  # W C W^+
        if kind == 2:
            vals.append(np.einsum("nij,jk,nkl,li->n", x, ops[1], y, ops[3], optimize=True))
        else:
            vals.append(np.einsum("nij,ji->n", x, ops[1]) * np.einsum("nij,ji->n", y, ops[3]))
    return np.concatenate(vals)


def mc_lemma1(a, b, d: int, n_samples: int, rng, label: str = "") -> LemmaCheckReport:
    a, b = _check_ops(d, a, b)
    mean, se = _complex_stats(_sample_lemma(1, (a, b), d, n_samples, rng))
    return LemmaCheckReport(1, d, n_samples, mean, lemma1_value(a, b), se, label)


def mc_lemma2(a, b, c, d_op, d: int, n_samples: int, rng, label: str = "") -> LemmaCheckReport:
    ops = _check_ops(d, a, b, c, d_op)
    mean, se = _complex_stats(_sample_lemma(2, ops, d, n_samples, rng))
    return LemmaCheckReport(2, d, n_samples, mean, lemma2_value(*ops), se, label)


def mc_lemma3(a, b, c, d_op, d: int, n_samples: int, rng, label: str = "") -> LemmaCheckReport:
    ops = _check_ops(d, a, b, c, d_op)
    mean, se = _complex_stats(_sample_lemma(3, ops, d, n_samples, rng))
    return LemmaCheckReport(3, d, n_samples, mean, lemma3_value(*ops), se, label)


def random_hermitian(d: int, rng) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def operator_battery(d: int, rng) -> dict[str, tuple[np.ndarray, ...]]:
    """Named (A, B, C, D) inputs: identity, rank-one projectors, traceless Pauli-Z, random Hermitian."""
    eye = np.eye(d, dtype=complex)
    p0 = np.zeros((d, d), dtype=complex)
    p0[0, 0] = 1
    p1 = np.zeros((d, d), dtype=complex)
    p1[-1, -1] = 1
    z = embed_single(PAULI["Z"], 0, int(np.log2(d))) if d & (d - 1) == 0 else np.diag(
        np.where(np.arange(d) % 2 == 0, 1.0, -1.0)).astype(complex)
    h = [random_hermitian(d, rng) for _ in range(4)]
    return {
        "identity": (eye, eye, eye, eye),
        "projector": (p0, p0, p0, p0),
        "projector-mixed": (p0, p1, p0, p1),
        "traceless": (z, p0, z, p0),
        "random-hermitian": tuple(h),
    }


def lemma_battery(d: int, n1: int, n23: int, rng) -> list[LemmaCheckReport]:
    reports = []
    for label, (a, b, c, dd) in operator_battery(d, rng).items():
        reports.append(mc_lemma1(a, b, d, n1, rng, label))
        reports.append(mc_lemma2(a, b, c, dd, d, n23, rng, label))
        reports.append(mc_lemma3(a, b, c, dd, d, n23, rng, label))
    return reports


# -- derivative in commutator form ----------------------------------------------------


def commutator_derivative(rho, u_right, u_left, h, qubit: int, axis: str, n: int) -> complex:
    """``(i/2) Tr[[U_R rho U_R^+, sigma_qubit] U_L^+ H U_L]`` (complex, for inspection)."""
    sigma = embed_single(PAULI[axis], qubit, n)
    x = u_right @ rho @ u_right.conj().T
    hl = u_left.conj().T @ h @ u_left
    return 0.5j * np.trace((x @ sigma - sigma @ x) @ hl)


def layer_unitaries(spec: AnsatzSpec, theta) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per layer: (dense rotation block, dense entangler)."""
    n = spec.n_qubits
    d = 2**n
    perm = entangler_permutation(spec)
    w = np.zeros((d, d), dtype=complex)
    w[np.arange(d), perm] = 1.0
    out = []
    for i in range(spec.depth_L):
        mats = [rotation_matrix(spec.rotation_axis, theta[i * n + j]) for j in range(n)]
        out.append((reduce(np.kron, mats[::-1]), w))
    return out


def split_at_parameter(spec: AnsatzSpec, theta, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(U_R, U_L)`` with ``U = U_L U_R`` and ``U_R`` ending right after the rotation block holding ``k``.

    Rotations within one block commute, so the generator of parameter ``k``
    can be placed at the cut.
    """
    if spec.n_qubits > 6:
        raise ConfigurationError("dense split is limited to n <= 6")
    layer = k // spec.n_qubits
    d = 2**spec.n_qubits
    u_right = np.eye(d, dtype=complex)
    u_left = np.eye(d, dtype=complex)
    for i, (rot, w) in enumerate(layer_unitaries(spec, np.asarray(theta, dtype=float))):
        if i < layer:
            u_right = w @ rot @ u_right
        elif i == layer:
            u_right = rot @ u_right
            u_left = w @ u_left
        else:
            u_left = w @ rot @ u_left
    return u_right, u_left


@dataclass
class VarianceReport:
    n_qubits: int
    depth_L: int
    param_index: int
    samples: int
    mean: float
    variance: float
    stderr: float
    variance_stderr: float
    max_imag: float = 0.0

    def as_row(self) -> dict:
        return asdict(self)


def _variance_report(vals: np.ndarray, n: int, L: int, k: int, max_imag: float = 0.0) -> VarianceReport:
    if vals.size < 2:
        raise ConfigurationError("need at least 2 samples")
    mean = float(vals.mean())
    var = float(vals.var(ddof=1))
    m4 = float(np.mean((vals - mean) ** 4))
    var_se = float(np.sqrt(max(m4 - var**2, 0.0) / vals.size))
    return VarianceReport(n, L, k, int(vals.size), mean, var, float(np.sqrt(var / vals.size)), var_se, max_imag)


def zero_mean_gradient_check(n: int, rho, h, sigma_axis: str, n_samples: int, rng,
                             qubit: int = 0, haar_left: bool = True) -> VarianceReport:
    """Sample ``dC/dtheta_k`` in commutator form with Haar ``U_R`` (and ``U_L``).

    With ``haar_left=False`` the left block is fixed to the identity.
    """
    if n > 4:
        raise ConfigurationError("dense Haar check is limited to n <= 4")
    d = 2**n
    rho = np.asarray(rho, dtype=complex)
    h = check_hermitian(h)
    if rho.shape != (d, d) or h.shape != (d, d):
        raise ShapeError("rho and H must be 2^n x 2^n")
    sigma = embed_single(PAULI[sigma_axis], qubit, n)
    vals = []
    for m in _chunks(n_samples):
        ur = haar_unitaries(d, m, rng)
        x = ur @ rho @ np.conj(np.swapaxes(ur, 1, 2))
        if haar_left:
            ul = haar_unitaries(d, m, rng)
            hl = np.conj(np.swapaxes(ul, 1, 2)) @ h @ ul
        else:
            hl = np.broadcast_to(h, (m, d, d))
        comm = x @ sigma - sigma @ x
        vals.append(0.5j * np.einsum("nij,nji->n", comm, hl))
    vals = np.concatenate(vals)
    max_imag = float(np.max(np.abs(vals.imag)))
    if max_imag >= 1e-10:
        raise ArithmeticError(f"derivative sample has imaginary part {max_imag:.3e}")
    return _variance_report(vals.real, n, 0, qubit, max_imag)


# -- variance scan over the ansatz ----------------------------------------------------


def gradient_samples(spec: AnsatzSpec, n_samples: int, param_index: int, rng,
                     state: StateVector | None = None) -> np.ndarray:
    """Shift-rule ``dC/dtheta_k`` of the local cost at ``n_samples`` uniform draws of theta."""
    if not 0 <= param_index < spec.param_count:
        raise ConfigurationError(f"param index {param_index} out of range")
    ev = CircuitEvaluator(state or zero_state(spec.n_qubits), spec)
    out = np.empty(n_samples)
    for start in range(0, n_samples, 256):
        stop = min(start + 256, n_samples)
        thetas = rng.uniform(0.0, 2 * np.pi, size=(stop - start, spec.param_count))
        rows = np.concatenate([thetas, thetas])
        rows[: stop - start, param_index] += np.pi / 2
        rows[stop - start :, param_index] -= np.pi / 2
        vals = ev.batch(rows)
        out[start:stop] = 0.5 * (vals[: stop - start] - vals[stop - start :])
    return out


def ansatz_variance_scan(n_values, n_samples: int, param_index: int, rng,
                         depth_rule="equal", entangler: str = "linear-cnot-ladder") -> list[VarianceReport]:
    reports = []
    for n in n_values:
        spec = AnsatzSpec(int(n), depth_for(int(n), depth_rule), "Y", entangler)
        vals = gradient_samples(spec, n_samples, param_index, rng)
        reports.append(_variance_report(vals, spec.n_qubits, spec.depth_L, param_index))
    return reports


def log_variance_slope(reports: list[VarianceReport]) -> float:
    """Least-squares slope of ``ln Var`` against ``n``."""
    if len(reports) < 2:
        return float("nan")
    n = np.array([r.n_qubits for r in reports], dtype=float)
    v = np.array([r.variance for r in reports])
    return float(np.polyfit(n, np.log(v), 1)[0])


# -- identity proximity ---------------------------------------------------------------


@dataclass
class IdentityProximityReport:
    scheme: str
    n_qubits: int
    depth_L: int
    seeds: list[int]
    mu: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.mu))

    @property
    def minimum(self) -> float:
        return float(np.min(self.mu))

    @property
    def maximum(self) -> float:
        return float(np.max(self.mu))


def proximity_mu(input_state: StateVector, spec: AnsatzSpec, theta) -> float:
    return norm_of_difference(apply_ansatz(input_state, spec, theta), input_state)


def identity_proximity(scheme: str, n: int, L: int, seeds, input_angles=None,
                       entangler: str = "linear-cnot-ladder") -> IdentityProximityReport:
    """``mu`` per seed for the angles each scheme starts training from."""
    if scheme not in ("net", *MODEL_KINDS):
        raise ConfigurationError(f"unknown scheme {scheme!r}")
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ConfigurationError("need at least one seed")
    phi = qubit_encode(pi4_input(n) if input_angles is None else input_angles)
    report = IdentityProximityReport(scheme, n, L, seeds)
    for seed in seeds:
        cfg = TrainConfig(scheme, n, L, seed=seed, entangler=entangler)
        if scheme == "net":
            theta = initial_theta(cfg)
        else:
            model, alpha = initial_hybrid(cfg)
            theta, _ = forward(model, alpha)
        report.mu.append(proximity_mu(phi, cfg.spec, theta))
    return report
