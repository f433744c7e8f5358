"""
Solapamientos |<Φ(x1)|Φ(x2)>|^2: exacto, test SWAP y test de inversión,
más la matriz de Gram de un conjunto de puntos.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field

from ..utils.seeds import derive_seed
from .embedding import N_QUBITS, as_params, embed, embed_many, embedding_circuit
from .noise import NoiseModel, noisy_sample
from .sim import (
    Gate,
    basis_probabilities,
    cswap,
    fidelity,
    h,
    inverse_circuit,
    marginal_probabilities,
    overlap_sq,
    remap_circuit,
    run_circuit,
    sample_counts,
)

SWAP_QUBITS = 1 + 2 * N_QUBITS
ANCILLA = 0


class OverlapKind(str, Enum):
    EXACT = "exact"
    SWAP_TEST = "swap"
    INVERSION_TEST = "inversion"


class OverlapMethod(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: OverlapKind = OverlapKind.EXACT
    shots: int = Field(default=8192, ge=1)  # se ignora con EXACT
    seed: int = Field(default=0, ge=0)
    noise: Optional[NoiseModel] = None

    @property
    def sampled(self) -> bool:
        return self.kind != OverlapKind.EXACT

    def reseeded(self, *keys: int) -> "OverlapMethod":
        """Misma configuración con una semilla derivada de (seed, *keys)."""
        return self.model_copy(update={"seed": derive_seed(self.seed, *keys)})


EXACT = OverlapMethod()


def overlap_exact(x1, x2, params) -> float:
    params = as_params(params)
    return fidelity(embed(x1, params), embed(x2, params))


# -------------------- Test SWAP --------------------
def swap_test_circuit(x1, x2, params) -> List[Gate]:
    """
    Ancilla en q0, Φ(x1) en (q1, q2), Φ(x2) en (q3, q4).
    Un c-SWAP por par de qubits: (1↔3) y (2↔4).
    """
    params = as_params(params)
    gates: List[Gate] = [h(ANCILLA)]
    gates += remap_circuit(embedding_circuit(x1, params), (1, 2))
    gates += remap_circuit(embedding_circuit(x2, params), (3, 4))
    gates += [cswap(ANCILLA, 1, 3), cswap(ANCILLA, 2, 4), h(ANCILLA)]
    return gates


def swap_test_probability(x1, x2, params) -> float:
    """P(ancilla = 0) exacta del circuito."""
    state = run_circuit(swap_test_circuit(x1, x2, params), SWAP_QUBITS)
    p = marginal_probabilities(basis_probabilities(state), SWAP_QUBITS, (ANCILLA,))
    return float(p[0])


def swap_test(x1, x2, params, shots: int, seed: int, noise: Optional[NoiseModel] = None) -> float:
    """F = 2·P(0) - 1, recortado a [0, 1]."""
    circuit = swap_test_circuit(x1, x2, params)
    if noise is None:
        counts = sample_counts(run_circuit(circuit, SWAP_QUBITS), shots, seed, qubits=(ANCILLA,))
    else:
        counts = noisy_sample(circuit, SWAP_QUBITS, noise, shots, seed, measured=(ANCILLA,))
    return float(np.clip(2.0 * counts.frequency("0") - 1.0, 0.0, 1.0))


# -------------------- Test de inversión --------------------
def inversion_test_circuit(x1, x2, params) -> List[Gate]:
    params = as_params(params)
    return embedding_circuit(x1, params) + inverse_circuit(embedding_circuit(x2, params))


def inversion_test_probability(x1, x2, params) -> float:
    state = run_circuit(inversion_test_circuit(x1, x2, params), N_QUBITS)
    return float(basis_probabilities(state)[0])


def inversion_test(x1, x2, params, shots: int, seed: int, noise: Optional[NoiseModel] = None) -> float:
    circuit = inversion_test_circuit(x1, x2, params)
    if noise is None:
        counts = sample_counts(run_circuit(circuit, N_QUBITS), shots, seed)
    else:
        counts = noisy_sample(circuit, N_QUBITS, noise, shots, seed)
    return float(np.clip(counts.frequency("0" * N_QUBITS), 0.0, 1.0))


def estimate_overlap(x1, x2, params, method: OverlapMethod = EXACT) -> float:
    if method.kind == OverlapKind.EXACT:
        return overlap_exact(x1, x2, params)
    if method.kind == OverlapKind.SWAP_TEST:
        return swap_test(x1, x2, params, method.shots, method.seed, method.noise)
    return inversion_test(x1, x2, params, method.shots, method.seed, method.noise)


# -------------------- Gram --------------------
@dataclass(frozen=True)
class GramMatrix:
    values: np.ndarray
    labels: np.ndarray
    # índice original de cada fila (las filas van ordenadas por clase)
    indices: np.ndarray

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    def block_mean(self, class_a: int, class_b: int) -> float:
        """Solapamiento medio entre filas de `class_a` y columnas de `class_b` (sin diagonal si a == b)."""
        ra = self.labels == class_a
        rb = self.labels == class_b
        block = self.values[np.ix_(ra, rb)]
        if class_a == class_b:
            n = block.shape[0]
            if n < 2:
                return float("nan")
            return float((block.sum() - np.trace(block)) / (n * (n - 1)))
        return float(block.mean())


def gram_matrix(
    points,
    labels: Sequence[int],
    params,
    method: OverlapMethod = EXACT,
    n_jobs: int = 1,
) -> GramMatrix:
    """
    values[i][j] = solapamiento entre los puntos i y j (ordenados por clase y
    luego por orden de entrada). Se calcula i <= j y se refleja.
    """
    X = np.asarray(points, dtype=float).reshape(-1, 2)
    y = np.asarray(labels, dtype=int).reshape(-1)
    if X.shape[0] == 0:
        raise ValueError("La matriz de Gram necesita al menos un punto")
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"{X.shape[0]} puntos pero {y.shape[0]} etiquetas")
    params = as_params(params)

    order = np.argsort(y, kind="stable")
    X, y = X[order], y[order]
    n = X.shape[0]
    iu = np.triu_indices(n)

    if method.kind == OverlapKind.EXACT:
        states = embed_many(X, params)
        upper = overlap_sq(states[iu[0]], states[iu[1]])
    else:
        # semilla por entrada: el resultado no depende del orden de evaluación
        upper = Parallel(n_jobs=n_jobs)(
            delayed(estimate_overlap)(X[i], X[j], params, method.reseeded(int(i), int(j)))
            for i, j in zip(*iu)
        )
        upper = np.asarray(upper, dtype=float)

    values = np.zeros((n, n), dtype=float)
    values[iu] = upper
    values.T[iu] = upper
    return GramMatrix(values=values, labels=y, indices=order)
