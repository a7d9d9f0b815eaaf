import numpy as np
import pytest

from plateaunet.errors import ConfigurationError
from plateaunet.trainer import (
    TrainConfig, aggregate, depth_for, run_sweep, stream_rng, train, train_baseline, train_hybrid,
)


def test_baseline_one_qubit_zero_input_converges():
    r = train_baseline(TrainConfig("net", 1, 1, eta=0.1, target_cost=0.001, seed=3, input="zero"))
    assert r.reached and r.epochs_to_target < 500


def test_baseline_one_qubit_pi4_input_converges():
    r = train_baseline(TrainConfig("net", 1, 1, eta=0.1, target_cost=0.001, seed=3))
    assert r.reached and r.epochs_to_target < 500


def test_target_above_initial_cost():
    r = train(TrainConfig("net", 2, 2, target_cost=0.999999, seed=1))
    assert r.reached and r.epochs_to_target == 0
    assert len(r.trajectory) == 1


def test_zero_max_epochs():
    r = train(TrainConfig("net", 2, 2, target_cost=1e-9, max_epochs=0, seed=1))
    assert not r.reached and r.epochs_to_target is None
    assert len(r.trajectory) == 1 and r.n_evals == 1


def test_hybrid_reaches_target():
    r = train_hybrid(TrainConfig("model1", 2, 2, eta=0.1, target_cost=0.3, max_epochs=10000, seed=0))
    assert r.reached


def test_hybrid_floor_at_two_qubits():
    # angles live in (-1, 1); at n = L = 2 the best reachable local cost is about 0.0109
    r = train_hybrid(TrainConfig("model1", 2, 2, target_cost=0.001, max_epochs=3000, seed=0))
    assert not r.reached
    assert r.final_cost > 0.0108


def test_eta_zero_keeps_cost_constant():
    r = train(TrainConfig("model2", 2, 2, eta=0.0, target_cost=0.001, max_epochs=20, seed=4))
    costs = [c for _, c in r.trajectory]
    assert len(costs) == 21
    assert all(c == costs[0] for c in costs)
    assert r.reached == (costs[0] <= 0.001)


@pytest.mark.parametrize("scheme", ["net", "model1", "model3"])
def test_same_seed_identical_trajectory(scheme):
    cfg = TrainConfig(scheme, 3, 3, max_epochs=50, seed=9)
    a, b = train(cfg), train(cfg)
    assert a.trajectory == b.trajectory
    np.testing.assert_array_equal(a.final_theta, b.final_theta)


@pytest.mark.parametrize("scheme", ["net", "model2"])
def test_evaluation_budget_per_epoch(scheme):
    n, L, epochs = 3, 2, 7
    r = train(TrainConfig(scheme, n, L, target_cost=1e-12, max_epochs=epochs, seed=2))
    assert not r.reached
    # every update costs 2nL + 1 evaluations; the final state is scored once more
    assert r.n_evals == epochs * (2 * n * L + 1) + 1


def test_epochs_to_target_is_first_hit():
    r = train(TrainConfig("net", 2, 2, target_cost=0.05, seed=5))
    costs = [c for _, c in r.trajectory]
    first = next(i for i, c in enumerate(costs) if c <= 0.05)
    assert r.epochs_to_target == first == len(costs) - 1


def test_config_validation():
    with pytest.raises(ConfigurationError):
        TrainConfig("net4", 2, 2)
    with pytest.raises(ConfigurationError):
        train_baseline(TrainConfig("model1", 2, 2))
    with pytest.raises(ConfigurationError):
        train_hybrid(TrainConfig("net", 2, 2))


def test_depth_rules():
    assert depth_for(5, "equal") == 5
    assert depth_for(5, "fixed:30") == 30
    assert depth_for(5, 20) == 20
    with pytest.raises(ConfigurationError):
        depth_for(5, "deep")


def test_named_streams_are_independent():
    a = stream_rng(7, "theta").uniform(size=4)
    b = stream_rng(7, "alpha").uniform(size=4)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, stream_rng(7, "theta").uniform(size=4))


def test_sweep_single_rep_statistics():
    res = run_sweep(["net", "model1"], [2, 3], "equal", reps=1, target_cost=0.3)
    assert len(res.runs) == 4
    for c in res.cells:
        assert c.mean_epochs == c.min_epochs == c.max_epochs


def test_sweep_degenerate():
    res = run_sweep(["net"], [1], "equal", reps=1, target_cost=0.3)
    assert len(res.cells) == 1


def test_sweep_excludes_failures():
    res = run_sweep(["model1"], [2], "equal", reps=2, target_cost=0.001, max_epochs=50)
    cell = res.cell("model1", 2)
    assert cell.failures == 2 and cell.mean_epochs is None


def test_sweep_worker_count_does_not_change_results():
    a = run_sweep(["net", "model1"], [2, 3], "fixed:3", reps=2, target_cost=0.2, workers=1)
    b = run_sweep(["net", "model1"], [2, 3], "fixed:3", reps=2, target_cost=0.2, workers=2)
    assert [r.trajectory for r in a.runs] == [r.trajectory for r in b.runs]
    assert aggregate(a.runs) == b.cells
