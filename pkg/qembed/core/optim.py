"""
RMSprop con gradientes por diferencias finitas centradas y bucle de entrenamiento.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .embedding import EmbeddingParams, as_params, embed_many
from .objectives import (
    ClassEnsemble,
    LabelSubspace,
    default_subspaces,
    explicit_cost_from_states,
    implicit_cost_from_states,
)

logger = logging.getLogger(__name__)

CostFn = Callable[[np.ndarray], float]


class Objective(str, Enum):
    IMPLICIT = "implicit"
    EXPLICIT = "explicit"


class NonFiniteCostError(RuntimeError):
    def __init__(self, value: float, epoch: Optional[int] = None) -> None:
        self.value = value
        self.epoch = epoch
        where = f" en la época {epoch}" if epoch is not None else ""
        super().__init__(f"Coste no finito{where}: {value!r}")


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = Field(default=100, ge=1)
    learning_rate: float = Field(default=0.01, gt=0.0)
    fd_step: float = Field(default=1e-3, gt=0.0)
    rmsprop_decay: float = Field(default=0.9, gt=0.0, lt=1.0)
    rmsprop_epsilon: float = Field(default=1e-8, gt=0.0)
    seed: int = Field(default=0, ge=0)


@dataclass
class OptimizerState:
    second_moment: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "OptimizerState":
        return cls(np.zeros(n))


@dataclass
class TrainRecord:
    cost_history: List[float]
    final_params: EmbeddingParams
    wall_time: float
    config: TrainConfig
    objective: Objective
    initial_params: EmbeddingParams
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self, include_wall_time: bool = True) -> Dict[str, Any]:
        return {
            "objective": self.objective.value,
            "cost_history": [float(c) for c in self.cost_history],
            "initial_params": self.initial_params.to_list(),
            "final_params": self.final_params.to_list(),
            "config": self.config.model_dump(),
            "wall_time_s": float(self.wall_time) if include_wall_time else None,
            **self.meta,
        }


# -------------------- Gradiente --------------------
def _checked(value: float) -> float:
    v = float(value)
    if not math.isfinite(v):
        raise NonFiniteCostError(v)
    return v


def gradient_fd(cost_fn: CostFn, params, fd_step: float) -> np.ndarray:
    """g_k = [C(θ + h e_k) - C(θ - h e_k)] / 2h."""
    if fd_step <= 0:
        raise ValueError("fd_step debe ser positivo")
    theta = np.array(params.thetas if isinstance(params, EmbeddingParams) else params, dtype=float).reshape(-1)
    grads = np.zeros_like(theta)
    for k in range(theta.shape[0]):
        plus = theta.copy()
        minus = theta.copy()
        plus[k] += fd_step
        minus[k] -= fd_step
        grads[k] = (_checked(cost_fn(plus)) - _checked(cost_fn(minus))) / (2.0 * fd_step)
    return grads


def rmsprop_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: OptimizerState,
    config: TrainConfig,
) -> Tuple[np.ndarray, OptimizerState]:
    theta = np.asarray(params, dtype=float)
    g = np.asarray(grads, dtype=float)
    if theta.shape != g.shape or state.second_moment.shape != g.shape:
        raise ValueError(f"Longitudes distintas: θ {theta.shape}, g {g.shape}, s {state.second_moment.shape}")
    rho = config.rmsprop_decay
    s = rho * state.second_moment + (1.0 - rho) * g * g
    new_theta = theta - config.learning_rate * g / (np.sqrt(s) + config.rmsprop_epsilon)
    return new_theta, OptimizerState(s)


# -------------------- Entrenamiento --------------------
def make_cost_fn(
    objective: Objective,
    ensembles: Sequence[ClassEnsemble],
    subspaces: Optional[Sequence[LabelSubspace]] = None,
) -> CostFn:
    objective = Objective(objective)
    members = [e.members for e in ensembles]
    if objective == Objective.IMPLICIT:
        def cost(theta: np.ndarray) -> float:
            return implicit_cost_from_states([embed_many(m, theta) for m in members])
        return cost

    subs = list(subspaces) if subspaces is not None else default_subspaces(len(ensembles))

    def cost(theta: np.ndarray) -> float:
        return explicit_cost_from_states([embed_many(m, theta) for m in members], subs)
    return cost


def train(
    objective: Objective,
    ensembles: Sequence[ClassEnsemble],
    config: TrainConfig = TrainConfig(),
    subspaces: Optional[Sequence[LabelSubspace]] = None,
    initial: Optional[EmbeddingParams] = None,
) -> TrainRecord:
    """
    RMSprop de lote completo. cost_history[0] es el coste inicial y luego uno
    por época (epochs + 1 valores).
    """
    objective = Objective(objective)
    if len(ensembles) < 2 or any(e.size == 0 for e in ensembles):
        raise ValueError("El entrenamiento necesita al menos 2 clases con puntos")
    cost_fn = make_cost_fn(objective, ensembles, subspaces)
    start = as_params(initial) if initial is not None else EmbeddingParams.random(config.seed)

    t0 = time.perf_counter()
    theta = start.thetas.copy()
    state = OptimizerState.zeros(theta.shape[0])
    history = [_checked(cost_fn(theta))]
    logger.debug("%s: coste inicial %.6f", objective.value, history[0])

    for epoch in range(1, config.epochs + 1):
        try:
            grads = gradient_fd(cost_fn, theta, config.fd_step)
            theta, state = rmsprop_step(theta, grads, state, config)
            if not np.all(np.isfinite(theta)):
                raise NonFiniteCostError(float("nan"))
            history.append(_checked(cost_fn(theta)))
        except NonFiniteCostError as e:
            raise NonFiniteCostError(e.value, epoch) from e
        if epoch % 10 == 0 or epoch == config.epochs:
            logger.debug("%s: época %d/%d coste %.6f", objective.value, epoch, config.epochs, history[-1])

    return TrainRecord(
        cost_history=history,
        final_params=EmbeddingParams(theta),
        wall_time=time.perf_counter() - t0,
        config=config,
        objective=objective,
        initial_params=start,
    )
