"""Gradient-descent loops for the direct ("net") and network-generated schemes."""
from __future__ import annotations

import logging
import time
import zlib
from dataclasses import dataclass, field, asdict

import numpy as np

from .ansatz import AnsatzSpec
from .encoding import pi4_input, qubit_encode
from .errors import ConfigurationError
from .gradients import CircuitEvaluator, hybrid_grad, shift_grad_and_cost
from .mlp import MODEL_KINDS, ALPHA_DIM, MlpModel, forward, init_model, make_architecture, sgd_step
from .statevector import zero_state

log = logging.getLogger(__name__)

SCHEMES = ("net", *MODEL_KINDS)
INPUTS = ("pi4", "zero")


@dataclass(frozen=True)
class TrainConfig:
    scheme: str
    n_qubits: int
    depth_L: int
    eta: float = 0.1
    target_cost: float = 0.001
    max_epochs: int = 10000
    seed: int = 0
    input: str = "pi4"
    rotation_axis: str = "Y"
    entangler: str = "linear-cnot-ladder"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.eta < 0:
            raise ConfigurationError("eta must be non-negative")
        if self.max_epochs < 0:
            raise ConfigurationError("max_epochs must be non-negative")
        if self.input not in INPUTS:
            raise ConfigurationError(f"input must be one of {INPUTS}")

    @property
    def spec(self) -> AnsatzSpec:
        return AnsatzSpec(self.n_qubits, self.depth_L, self.rotation_axis, self.entangler)


@dataclass
class RunResult:
    config: TrainConfig
    reached: bool
    epochs_to_target: int | None
    trajectory: list[tuple[int, float]]
    final_theta: np.ndarray
    final_cost: float
    n_evals: int = 0
    wall_time: float = 0.0
    final_model: MlpModel | None = field(default=None, repr=False)
    final_alpha: np.ndarray | None = None

    def summary(self) -> dict:
        return {
            "config": asdict(self.config),
            "reached": self.reached,
            "epochs_to_target": self.epochs_to_target,
            "epochs_run": len(self.trajectory) - 1,
            "initial_cost": self.trajectory[0][1],
            "final_cost": self.final_cost,
            "cost_evaluations": self.n_evals,
            "final_theta": self.final_theta.tolist(),
        }


def depth_for(n: int, depth_rule) -> int:
    """``"equal"`` gives L = n; an int (or ``"fixed:K"``) gives a fixed depth."""
    if depth_rule in ("equal", "equal_n"):
        return n
    if isinstance(depth_rule, str) and depth_rule.startswith("fixed:"):
        depth_rule = depth_rule.split(":", 1)[1]
    try:
        L = int(depth_rule)
    except (TypeError, ValueError):
        raise ConfigurationError(f"bad depth rule {depth_rule!r}") from None
    if L < 1:
        raise ConfigurationError("fixed depth must be positive")
    return L


def stream_rng(seed: int, name: str) -> np.random.Generator:
    """Independent generator for a named purpose derived from one run seed."""
    return np.random.default_rng([int(seed) & (2**64 - 1), zlib.crc32(name.encode())])


def input_state(config: TrainConfig):
    n = config.n_qubits
    return qubit_encode(pi4_input(n)) if config.input == "pi4" else zero_state(n)


def initial_theta(config: TrainConfig) -> np.ndarray:
    return stream_rng(config.seed, "theta").uniform(0.0, 2 * np.pi, size=config.spec.param_count)


def initial_hybrid(config: TrainConfig) -> tuple[MlpModel, np.ndarray]:
    arch = make_architecture(config.scheme, config.n_qubits, config.depth_L)
    alpha = stream_rng(config.seed, "alpha").uniform(0.0, 2 * np.pi, size=ALPHA_DIM)
    return init_model(arch, stream_rng(config.seed, "model")), alpha


def _finish(config, trajectory, theta, evaluator, start, target_hit, **extra) -> RunResult:
    return RunResult(
        config=config,
        reached=target_hit is not None,
        epochs_to_target=target_hit,
        trajectory=trajectory,
        final_theta=np.asarray(theta),
        final_cost=trajectory[-1][1],
        n_evals=evaluator.n_evals,
        wall_time=time.perf_counter() - start,
        **extra,
    )


def train_baseline(config: TrainConfig) -> RunResult:
    """Descend directly on theta drawn from U[0, 2pi]."""
    if config.scheme != "net":
        raise ConfigurationError("train_baseline needs scheme 'net'")
    start = time.perf_counter()
    evaluator = CircuitEvaluator(input_state(config), config.spec)
    theta = initial_theta(config)
    trajectory = []
    hit = None
    for epoch in range(config.max_epochs + 1):
        if epoch == config.max_epochs:
            cost = evaluator(theta)
            grad = None
        else:
            grad, cost = shift_grad_and_cost(evaluator, theta)
        trajectory.append((epoch, cost))
        if cost <= config.target_cost:
            hit = epoch
            break
        if grad is not None:
            theta = theta - config.eta * grad
    log.debug("net n=%d L=%d seed=%d: %d epochs, cost %.4g", config.n_qubits,
              config.depth_L, config.seed, len(trajectory) - 1, trajectory[-1][1])
    return _finish(config, trajectory, theta, evaluator, start, hit)


def train_hybrid(config: TrainConfig) -> RunResult:
    """Descend on network weights and alpha; theta is the network output."""
    if config.scheme not in MODEL_KINDS:
        raise ConfigurationError(f"train_hybrid needs one of {MODEL_KINDS}")
    start = time.perf_counter()
    evaluator = CircuitEvaluator(input_state(config), config.spec)
    model, alpha = initial_hybrid(config)
    trajectory = []
    hit = None
    theta = None
    for epoch in range(config.max_epochs + 1):
        if epoch == config.max_epochs:
            theta, _ = forward(model, alpha)
            cost = evaluator(theta)
            grads = None
        else:
            grads, theta, cost = hybrid_grad(model, alpha, evaluator)
        trajectory.append((epoch, cost))
        if cost <= config.target_cost:
            hit = epoch
            break
        if grads is not None:
            model, alpha = sgd_step(model, alpha, grads, config.eta)
    return _finish(config, trajectory, theta, evaluator, start, hit,
                   final_model=model, final_alpha=alpha)


def train(config: TrainConfig) -> RunResult:
    return train_baseline(config) if config.scheme == "net" else train_hybrid(config)


# -- sweeps -------------------------------------------------------------------------


@dataclass
class SweepCell:
    scheme: str
    n_qubits: int
    depth_L: int
    reps: int
    failures: int
    mean_epochs: float | None
    min_epochs: int | None
    max_epochs: int | None


@dataclass
class SweepResult:
    runs: list[RunResult]
    cells: list[SweepCell]

    def cell(self, scheme: str, n: int) -> SweepCell:
        for c in self.cells:
            if c.scheme == scheme and c.n_qubits == n:
                return c
        raise KeyError((scheme, n))


def aggregate(runs: list[RunResult]) -> list[SweepCell]:
    """Per (scheme, n) epoch statistics over the runs that reached the target."""
    groups: dict[tuple, list[RunResult]] = {}
    for r in runs:
        groups.setdefault((r.config.scheme, r.config.n_qubits, r.config.depth_L), []).append(r)
    cells = []
    for (scheme, n, L), rs in groups.items():
        hits = [r.epochs_to_target for r in rs if r.reached]
        cells.append(SweepCell(
            scheme, n, L, len(rs), len(rs) - len(hits),
            float(np.mean(hits)) if hits else None,
            min(hits) if hits else None,
            max(hits) if hits else None,
        ))
    return cells


def sweep_configs(schemes, n_values, depth_rule, reps: int, seed_base: int = 0, **shared) -> list[TrainConfig]:
    if reps < 1:
        raise ConfigurationError("reps must be at least 1")
    if not schemes:
        raise ConfigurationError("empty scheme list")
    return [
        TrainConfig(scheme, int(n), depth_for(int(n), depth_rule), seed=seed_base + r, **shared)
        for scheme in schemes
        for n in n_values
        for r in range(reps)
    ]


def run_configs(configs: list[TrainConfig], workers: int = 1) -> list[RunResult]:
    """Train every config; results come back in input order whatever ``workers`` is."""
    if workers <= 1:
        return [train(c) for c in configs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(train, configs))


def run_sweep(schemes, n_values, depth_rule="equal", reps: int = 10, seed_base: int = 0,
              workers: int = 1, **shared) -> SweepResult:
    """Repeat training for every (scheme, n); repetition ``r`` uses seed ``seed_base + r``."""
    runs = run_configs(sweep_configs(schemes, n_values, depth_rule, reps, seed_base, **shared), workers)
    return SweepResult(runs, aggregate(runs))
