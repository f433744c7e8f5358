"""
Circuito de embedding Φ(x, θ) de dos qubits.

Unidad (de izquierda a derecha):
  RY(x1) q0, RY(x2) q1 | RX(θ1) q0, RX(θ2) q1 | CNOT(0→1) | RZ(θ3) q1 | CNOT(0→1) | RY(θ4) q0, RY(θ5) q1

CNOT·RZ(θ3) sobre el objetivo·CNOT es el acoplamiento exp(-i θ3 Z⊗Z / 2) del ansatz
tipo QAOA. Con RZ sobre el control el par de CNOT se cancela y la unidad
queda en producto de un qubit por feature.

La unidad se repite 4 veces (5 ángulos por repetición) y al final se añade
una capa de features más: 4·9 + 2 = 38 puertas, 20 parámetros entrenables.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import math

import numpy as np

from .sim import (
    Gate,
    GateKind,
    Statevector,
    apply_circuit,
    apply_matrix,
    cnot,
    gate_matrix,
    rotation_matrices,
    rx,
    ry,
    rz,
    zero_state,
)

N_QUBITS = 2
N_LAYERS = 4
ANGLES_PER_UNIT = 5
N_FEATURES = 2


def param_count() -> int:
    return N_LAYERS * ANGLES_PER_UNIT


@dataclass(frozen=True)
class EmbeddingParams:
    thetas: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.thetas, dtype=float).reshape(-1)
        if t.shape[0] != param_count():
            raise ValueError(f"Se esperaban {param_count()} ángulos, recibidos {t.shape[0]}")
        if not np.all(np.isfinite(t)):
            raise ValueError("Los ángulos deben ser finitos")
        t.setflags(write=False)
        object.__setattr__(self, "thetas", t)

    @classmethod
    def random(cls, seed: int) -> "EmbeddingParams":
        """Ángulos uniformes en [0, 2π)."""
        rng = np.random.default_rng(seed)
        return cls(rng.uniform(0.0, 2.0 * math.pi, size=param_count()))

    @classmethod
    def zeros(cls) -> "EmbeddingParams":
        return cls(np.zeros(param_count()))

    def layer(self, k: int) -> np.ndarray:
        if not 0 <= k < N_LAYERS:
            raise ValueError(f"Capa {k} fuera de rango (0..{N_LAYERS - 1})")
        return self.thetas[k * ANGLES_PER_UNIT:(k + 1) * ANGLES_PER_UNIT]

    def to_list(self) -> List[float]:
        return [float(v) for v in self.thetas]


def as_params(params) -> EmbeddingParams:
    return params if isinstance(params, EmbeddingParams) else EmbeddingParams(params)


def feature_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape[0] != N_FEATURES:
        raise ValueError(f"Un punto necesita {N_FEATURES} features, recibidas {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"Features no finitas: {v.tolist()}")
    return v


# -------------------- Circuitos --------------------
def feature_layer(x) -> List[Gate]:
    v = feature_vector(x)
    return [ry(0, v[0]), ry(1, v[1])]


def trainable_block(layer_thetas: Sequence[float]) -> List[Gate]:
    t = np.asarray(layer_thetas, dtype=float).reshape(-1)
    if t.shape[0] != ANGLES_PER_UNIT:
        raise ValueError(f"Una unidad necesita {ANGLES_PER_UNIT} ángulos, recibidos {t.shape[0]}")
    return [
        rx(0, t[0]),
        rx(1, t[1]),
        cnot(0, 1),
        rz(1, t[2]),
        cnot(0, 1),
        ry(0, t[3]),
        ry(1, t[4]),
    ]


def unit_circuit(x, layer_thetas: Sequence[float]) -> List[Gate]:
    return feature_layer(x) + trainable_block(layer_thetas)


def embedding_circuit(x, params) -> List[Gate]:
    params = as_params(params)
    gates: List[Gate] = []
    for k in range(N_LAYERS):
        gates += unit_circuit(x, params.layer(k))
    gates += feature_layer(x)
    return gates


def embed(x, params) -> Statevector:
    return apply_circuit(zero_state(N_QUBITS), embedding_circuit(x, params))


# -------------------- Versión vectorizada --------------------
def _feature_layer_many(amps: np.ndarray, X: np.ndarray) -> np.ndarray:
    amps = apply_matrix(amps, rotation_matrices(GateKind.RY, X[:, 0]), (0,), N_QUBITS)
    return apply_matrix(amps, rotation_matrices(GateKind.RY, X[:, 1]), (1,), N_QUBITS)


def embed_many(X, params) -> np.ndarray:
    """
    Amplitudes de Φ(x, θ)|00> para N puntos a la vez: forma (N, 4).
    Misma secuencia de puertas que `embed`, fila a fila.
    """
    params = as_params(params)
    X = np.asarray(X, dtype=float).reshape(-1, N_FEATURES)
    if not np.all(np.isfinite(X)):
        raise ValueError("Features no finitas")
    amps = np.zeros((X.shape[0], 2 ** N_QUBITS), dtype=complex)
    amps[:, 0] = 1.0
    for k in range(N_LAYERS):
        amps = _feature_layer_many(amps, X)
        for g in trainable_block(params.layer(k)):
            amps = apply_matrix(amps, gate_matrix(g), g.targets, N_QUBITS)
    return _feature_layer_many(amps, X)
