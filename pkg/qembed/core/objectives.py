"""
Vectores clasificadores, funciones de coste implícita/explícita y predicción.

Coste genérico (norma L1):
    C = (1/L) Σ_i (1/N_i) Σ_j || f(x_i^j, θ) - y_i ||_1

Con f_i = Tr(|x><x| σ_i) (enfoque implícito) se desarrolla exactamente en
    C = 1 - (1/L) Σ_i Tr σ_i² + (2/L) Σ_{i<j} Tr σ_i σ_j
y con f_i = <x|P_i|x> (subespacios de la base computacional) en el coste explícito.

Las reducciones usan math.fsum: el resultado no depende del orden de los puntos.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import math

import numpy as np

from .embedding import N_QUBITS, as_params, embed_many, embedding_circuit, feature_vector
from .noise import noisy_sample
from .overlap import EXACT, OverlapMethod, estimate_overlap
from .sim import bitstring, overlap_sq, run_circuit, sample_counts

VECTOR_TOL = 1e-9


# -------------------- Tipos --------------------
@dataclass(frozen=True)
class ClassEnsemble:
    class_id: int
    members: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.members, dtype=float).reshape(-1, 2)
        if m.shape[0] == 0:
            raise ValueError(f"La clase {self.class_id} no tiene puntos")
        m.setflags(write=False)
        object.__setattr__(self, "class_id", int(self.class_id))
        object.__setattr__(self, "members", m)

    @property
    def size(self) -> int:
        return int(self.members.shape[0])


@dataclass(frozen=True)
class LabelSubspace:
    class_id: int
    basis_states: Tuple[str, ...]

    def __post_init__(self) -> None:
        states = tuple(str(b) for b in self.basis_states)
        if not states:
            raise ValueError(f"El subespacio de la clase {self.class_id} está vacío")
        if len(set(states)) != len(states):
            raise ValueError(f"Estados repetidos en el subespacio de la clase {self.class_id}")
        widths = {len(b) for b in states}
        if len(widths) != 1 or any(set(b) - {"0", "1"} for b in states):
            raise ValueError(f"Estados de base no válidos: {states}")
        object.__setattr__(self, "class_id", int(self.class_id))
        object.__setattr__(self, "basis_states", states)

    @property
    def n_qubits(self) -> int:
        return len(self.basis_states[0])

    def indices(self) -> List[int]:
        return [int(b, 2) for b in self.basis_states]


Model = Union[Sequence[ClassEnsemble], Sequence[LabelSubspace]]


def label_vector(class_id: int, n_classes: int) -> np.ndarray:
    if not 0 <= class_id < n_classes:
        raise ValueError(f"Clase {class_id} fuera de rango (L={n_classes})")
    y = np.zeros(n_classes)
    y[class_id] = 1.0
    return y


def classifying_vector(values) -> np.ndarray:
    f = np.asarray(values, dtype=float).reshape(-1)
    if np.any(f < -VECTOR_TOL) or np.any(f > 1.0 + VECTOR_TOL):
        raise ValueError(f"Entradas del vector clasificador fuera de [0, 1]: {f.tolist()}")
    return f


def ensembles_from_points(points, labels) -> List[ClassEnsemble]:
    X = np.asarray(points, dtype=float).reshape(-1, 2)
    y = np.asarray(labels, dtype=int).reshape(-1)
    classes = sorted(set(y.tolist()))
    if classes != list(range(len(classes))):
        raise ValueError(f"Las etiquetas deben ser 0..L-1, encontradas {classes}")
    return [ClassEnsemble(c, X[y == c]) for c in classes]


def _check_ensembles(ensembles: Sequence[ClassEnsemble]) -> None:
    ids = [e.class_id for e in ensembles]
    if ids != list(range(len(ids))):
        raise ValueError(f"Los ensembles deben cubrir las clases 0..L-1 en orden, recibidos {ids}")


def validate_subspaces(subspaces: Sequence[LabelSubspace], n_qubits: int = N_QUBITS) -> None:
    ids = [s.class_id for s in subspaces]
    if ids != list(range(len(ids))):
        raise ValueError(f"Los subespacios deben cubrir las clases 0..L-1 en orden, recibidos {ids}")
    seen = set()
    for s in subspaces:
        if s.n_qubits != n_qubits:
            raise ValueError(f"El subespacio {s.basis_states} no es de {n_qubits} qubits")
        overlap = seen & set(s.basis_states)
        if overlap:
            raise ValueError(f"Subespacios no disjuntos: {sorted(overlap)}")
        seen |= set(s.basis_states)


def default_subspaces(n_classes: int, n_qubits: int = N_QUBITS) -> List[LabelSubspace]:
    """L=2: {|00>}, {|11>}; hasta 2^n clases: un estado de base por clase."""
    if n_classes == 2:
        return [LabelSubspace(0, ("0" * n_qubits,)), LabelSubspace(1, ("1" * n_qubits,))]
    if 2 < n_classes <= 2 ** n_qubits:
        return [LabelSubspace(i, (bitstring(i, n_qubits),)) for i in range(n_classes)]
    raise ValueError(f"No hay subespacios por defecto para L={n_classes} con {n_qubits} qubits")


# -------------------- Vectores clasificadores --------------------
def implicit_classifying_vector(x, params, ensembles: Sequence[ClassEnsemble], method: OverlapMethod = EXACT) -> np.ndarray:
    """f_i = (1/N_i) Σ_j overlap(x, x_i^j)."""
    _check_ensembles(ensembles)
    params = as_params(params)
    x = feature_vector(x)
    if not method.sampled:
        psi = embed_many(x[None, :], params)[0]
        return classifying_vector([
            math.fsum(overlap_sq(psi[None, :], embed_many(e.members, params))) / e.size
            for e in ensembles
        ])
    f = []
    for e in ensembles:
        vals = [
            estimate_overlap(x, m, params, method.reseeded(e.class_id, j))
            for j, m in enumerate(e.members)
        ]
        f.append(math.fsum(vals) / e.size)
    return classifying_vector(f)


def explicit_classifying_vector(x, params, subspaces: Sequence[LabelSubspace], method: OverlapMethod = EXACT) -> np.ndarray:
    """
    f_i = probabilidad de medir un estado de H_i. Con método muestreado se
    mide el circuito de embedding (con o sin ruido) `shots` veces.
    """
    validate_subspaces(subspaces)
    params = as_params(params)
    x = feature_vector(x)
    if not method.sampled:
        probs = np.abs(embed_many(x[None, :], params)[0]) ** 2
        return classifying_vector([math.fsum(probs[s.indices()]) for s in subspaces])

    circuit = embedding_circuit(x, params)
    if method.noise is None:
        counts = sample_counts(run_circuit(circuit, N_QUBITS), method.shots, method.seed)
    else:
        counts = noisy_sample(circuit, N_QUBITS, method.noise, method.shots, method.seed)
    return classifying_vector([math.fsum(counts.frequency(b) for b in s.basis_states) for s in subspaces])


# -------------------- Costes --------------------
def generic_cost(
    training: Sequence[ClassEnsemble],
    vectors: Sequence[Sequence[np.ndarray]],
    labels: Sequence[np.ndarray],
) -> float:
    """
    `vectors[i][j]` es f(x_i^j) del j-ésimo punto de la clase i y `labels[i]`
    el vector one-hot de la clase i.
    """
    if not (len(training) == len(vectors) == len(labels)):
        raise ValueError("training, vectors y labels deben tener una entrada por clase")
    L = len(training)
    per_class = []
    for e, fs, y in zip(training, vectors, labels):
        if len(fs) != e.size:
            raise ValueError(f"La clase {e.class_id} tiene {e.size} puntos y {len(fs)} vectores")
        per_class.append(math.fsum(math.fsum(np.abs(np.asarray(f) - y)) for f in fs) / e.size)
    return math.fsum(per_class) / L


def ensemble_overlaps(class_states: Sequence[np.ndarray]) -> np.ndarray:
    """T[i, j] = Tr(σ_i σ_j) = (1/N_i N_j) Σ_k Σ_p |<x_i^k|x_j^p>|^2."""
    L = len(class_states)
    T = np.zeros((L, L))
    for i in range(L):
        for j in range(i, L):
            a, b = class_states[i], class_states[j]
            block = overlap_sq(a[:, None, :], b[None, :, :])
            T[i, j] = T[j, i] = math.fsum(block.ravel()) / (a.shape[0] * b.shape[0])
    return T


def implicit_cost_from_states(class_states: Sequence[np.ndarray]) -> float:
    L = len(class_states)
    if L < 2:
        raise ValueError("El coste implícito necesita al menos 2 clases")
    T = ensemble_overlaps(class_states)
    purity = math.fsum(T[i, i] for i in range(L))
    cross = math.fsum(T[i, j] for i in range(L) for j in range(i + 1, L))
    return 1.0 - purity / L + 2.0 * cross / L


def implicit_cost(ensembles: Sequence[ClassEnsemble], params) -> float:
    _check_ensembles(ensembles)
    params = as_params(params)
    return implicit_cost_from_states([embed_many(e.members, params) for e in ensembles])


def explicit_cost_from_states(class_states: Sequence[np.ndarray], subspaces: Sequence[LabelSubspace]) -> float:
    L = len(class_states)
    if L < 2:
        raise ValueError("El coste explícito necesita al menos 2 clases")
    if len(subspaces) != L:
        raise ValueError(f"{L} clases pero {len(subspaces)} subespacios")
    n_qubits = int(round(math.log2(class_states[0].shape[-1])))
    validate_subspaces(subspaces, n_qubits)
    per_class = []
    for i, states in enumerate(class_states):
        probs = np.abs(states) ** 2
        f = np.stack([probs[:, s.indices()].sum(axis=1) for s in subspaces], axis=1)
        dist = np.abs(f - label_vector(i, L)).sum(axis=1)
        per_class.append(math.fsum(dist) / states.shape[0])
    return math.fsum(per_class) / L


def explicit_cost(ensembles: Sequence[ClassEnsemble], params, subspaces: Sequence[LabelSubspace]) -> float:
    _check_ensembles(ensembles)
    params = as_params(params)
    return explicit_cost_from_states([embed_many(e.members, params) for e in ensembles], subspaces)


# -------------------- Predicción --------------------
def predict_from_vector(f) -> int:
    # np.argmax devuelve el primer máximo: empate -> clase de índice menor
    return int(np.argmax(np.asarray(f, dtype=float)))


def _is_implicit(model: Model) -> bool:
    if not model:
        raise ValueError("Modelo vacío")
    if all(isinstance(m, ClassEnsemble) for m in model):
        return True
    if all(isinstance(m, LabelSubspace) for m in model):
        return False
    raise ValueError("El modelo debe ser una lista de ClassEnsemble o de LabelSubspace")


def classify(x, params, model: Model, method: OverlapMethod = EXACT) -> np.ndarray:
    if _is_implicit(model):
        return implicit_classifying_vector(x, params, model, method)
    return explicit_classifying_vector(x, params, model, method)


def predict(x, params, model: Model, method: OverlapMethod = EXACT) -> int:
    return predict_from_vector(classify(x, params, model, method))


def predict_many(X, params, model: Model) -> np.ndarray:
    """Predicción exacta vectorizada para una matriz de puntos (N, 2)."""
    params = as_params(params)
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    states = embed_many(X, params)
    if _is_implicit(model):
        _check_ensembles(model)
        F = np.stack(
            [overlap_sq(states[:, None, :], embed_many(e.members, params)[None, :, :]).mean(axis=1) for e in model],
            axis=1,
        )
    else:
        validate_subspaces(model)
        probs = np.abs(states) ** 2
        F = np.stack([probs[:, s.indices()].sum(axis=1) for s in model], axis=1)
    return np.argmax(F, axis=1)
