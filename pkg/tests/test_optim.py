import math

import numpy as np
import pytest

from qembed.core import optim
from qembed.core.embedding import EmbeddingParams
from qembed.core.objectives import ClassEnsemble, default_subspaces
from qembed.core.optim import (
    NonFiniteCostError,
    Objective,
    OptimizerState,
    TrainConfig,
    gradient_fd,
    make_cost_fn,
    rmsprop_step,
    train,
)

from .conftest import random_points, random_thetas


def _ensembles(rng, L=2, n=4):
    return [ClassEnsemble(c, random_points(rng, n)) for c in range(L)]


def test_fd_gradient_is_stable_in_step(rng):
    for _ in range(5):
        cost = make_cost_fn(Objective.IMPLICIT, _ensembles(rng, L=int(rng.integers(2, 4))))
        theta = random_thetas(rng)
        g3 = gradient_fd(cost, theta, 1e-3)
        g4 = gradient_fd(cost, theta, 1e-4)
        assert np.max(np.abs(g3 - g4)) < 1e-4


def test_fd_gradient_of_quadratic():
    grads = gradient_fd(lambda t: float(np.sum(t ** 2)), np.arange(20, dtype=float), 1e-3)
    assert np.allclose(grads, 2 * np.arange(20), atol=1e-6)
    with pytest.raises(ValueError):
        gradient_fd(lambda t: 0.0, np.zeros(3), 0.0)


def test_rmsprop_step_formula():
    cfg = TrainConfig(learning_rate=0.1, rmsprop_decay=0.9, rmsprop_epsilon=1e-8)
    theta = np.array([1.0, -2.0])
    g = np.array([0.5, -4.0])
    state = OptimizerState(np.array([0.0, 1.0]))
    new_theta, new_state = rmsprop_step(theta, g, state, cfg)
    s = 0.9 * np.array([0.0, 1.0]) + 0.1 * g ** 2
    assert np.allclose(new_state.second_moment, s)
    assert np.allclose(new_theta, theta - 0.1 * g / (np.sqrt(s) + 1e-8))
    # el estado anterior no se modifica
    assert np.array_equal(state.second_moment, [0.0, 1.0])


def test_rmsprop_zero_gradient_keeps_params():
    cfg = TrainConfig()
    theta = np.ones(20)
    new_theta, _ = rmsprop_step(theta, np.zeros(20), OptimizerState.zeros(20), cfg)
    assert np.array_equal(new_theta, theta)


def test_train_history_length_and_determinism(rng):
    ens = _ensembles(rng)
    cfg = TrainConfig(epochs=5, seed=3)
    a = train(Objective.IMPLICIT, ens, cfg)
    b = train(Objective.IMPLICIT, ens, cfg)
    assert len(a.cost_history) == 6
    assert a.cost_history == b.cost_history
    assert np.array_equal(a.final_params.thetas, b.final_params.thetas)
    assert np.array_equal(a.initial_params.thetas, EmbeddingParams.random(3).thetas)


def test_train_decreases_cost(rng):
    ens = _ensembles(rng, n=5)
    for objective, subs in ((Objective.IMPLICIT, None), (Objective.EXPLICIT, default_subspaces(2))):
        rec = train(objective, ens, TrainConfig(epochs=15, seed=1), subspaces=subs)
        assert rec.cost_history[-1] < rec.cost_history[0]


def test_train_with_initial_params(rng):
    ens = _ensembles(rng)
    init = EmbeddingParams(random_thetas(rng))
    rec = train(Objective.EXPLICIT, ens, TrainConfig(epochs=1), initial=init)
    assert rec.initial_params is init
    assert np.isclose(rec.cost_history[0], make_cost_fn(Objective.EXPLICIT, ens)(init.thetas))


def test_non_finite_cost_reports_epoch(rng, monkeypatch):
    calls = {"n": 0}

    def fake_cost_fn(objective, ensembles, subspaces=None):
        def cost(theta):
            calls["n"] += 1
            return 1.0 if calls["n"] == 1 else math.nan
        return cost

    monkeypatch.setattr(optim, "make_cost_fn", fake_cost_fn)
    with pytest.raises(NonFiniteCostError) as exc:
        train(Objective.IMPLICIT, _ensembles(rng), TrainConfig(epochs=3))
    assert exc.value.epoch == 1
    assert math.isnan(exc.value.value)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(rmsprop_decay=1.0)


def test_train_needs_two_classes(rng):
    with pytest.raises(ValueError):
        train(Objective.IMPLICIT, _ensembles(rng, L=1), TrainConfig(epochs=1))


def test_record_to_dict(rng):
    rec = train(Objective.IMPLICIT, _ensembles(rng), TrainConfig(epochs=1))
    d = rec.to_dict(include_wall_time=False)
    assert d["wall_time_s"] is None
    assert d["objective"] == "implicit"
    assert len(d["final_params"]) == 20
    assert d["config"]["epochs"] == 1
    assert rec.to_dict()["wall_time_s"] >= 0.0


def test_fd_gradient_agrees_with_richardson_extrapolation(rng):
    # la diferencia central con h y h/2 extrapolada elimina el término O(h^2)
    cost = make_cost_fn(Objective.EXPLICIT, _ensembles(rng, n=3), default_subspaces(2))
    theta = random_thetas(rng)
    h = 1e-2
    g_h = gradient_fd(cost, theta, h)
    g_half = gradient_fd(cost, theta, h / 2)
    richardson = (4 * g_half - g_h) / 3
    assert np.max(np.abs(g_h - richardson)) < 1e-4
    assert np.max(np.abs(gradient_fd(cost, theta, 1e-3) - richardson)) < 1e-5


def test_one_point_per_class_separates_fully():
    ens = [ClassEnsemble(0, np.array([[0.3, 0.4]])), ClassEnsemble(1, np.array([[2.7, 2.9]]))]
    rec = train(Objective.IMPLICIT, ens, TrainConfig(epochs=100, seed=0))
    # con un punto por clase el coste implícito es |<x_0|x_1>|^2
    assert rec.cost_history[-1] <= 0.05
