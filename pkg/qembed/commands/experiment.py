"""
Piezas comunes de los comandos: especificación del experimento, preparación
de datos, construcción del modelo y evaluación con informe de métricas.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sklearn.metrics import accuracy_score, confusion_matrix

from ..config import settings
from ..core.datasets import LabeledDataset, SplitSpec, load_iris, make_circles, make_moons, rescale, split
from ..core.embedding import EmbeddingParams
from ..core.noise import NoiseModel, builtin_noise_model
from ..core.objectives import Model, default_subspaces, ensembles_from_points, predict, predict_many
from ..core.optim import Objective, TrainConfig
from ..core.overlap import OverlapKind, OverlapMethod
from ..repo.exports import read_dataset_csv
from ..utils.seeds import derive_seed

logger = logging.getLogger(__name__)

BUILTIN_DATASETS = ("iris", "circles", "moons")
DEFAULT_TRAIN_PER_CLASS = {"iris": 10, "circles": 15, "moons": 25}

CIRCLES_POOL_PER_CLASS = 65
CIRCLES_TEST_PER_CLASS = 50
MOONS_PER_CLASS = 100
MOONS_POOL_PER_CLASS = 50

# claves fijas para derivar semillas independientes a partir de la del experimento
_KEY_TEST_POOL = 1
_KEY_SUBSET = 2
_KEY_EVAL = 3


# -------------------- Modelos --------------------
class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dataset: str = "iris"  # iris | circles | moons | ruta a un CSV f1,f2,label
    approach: Objective = Objective.IMPLICIT
    train: TrainConfig = TrainConfig()
    method: OverlapKind = OverlapKind.EXACT
    shots: int = Field(default_factory=lambda: settings.default_shots, ge=1)
    noise: Optional[str] = None
    train_per_class: Optional[int] = Field(default=None, ge=1)
    sweep: bool = False
    sizes: Optional[List[int]] = None
    repeats: int = Field(default=10, ge=1)
    out_dir: str = "."

    @field_validator("noise", mode="before")
    @classmethod
    def _none_is_noiseless(cls, v):
        if v is None or str(v).strip().lower() in ("", "none"):
            return None
        return str(v).strip().lower()

    @model_validator(mode="after")
    def _check(self):
        if self.noise is not None:
            builtin_noise_model(self.noise)
            if self.method == OverlapKind.EXACT:
                raise ValueError("--noise requiere un método muestreado (--method swap|inversion)")
        if self.sweep:
            if self.dataset != "moons":
                raise ValueError("El barrido solo está definido para moons")
            if not self.sizes:
                raise ValueError("moons-sweep necesita una lista de tamaños de entrenamiento")
            bad = [s for s in self.sizes if not 1 <= s < MOONS_POOL_PER_CLASS]
            if bad:
                raise ValueError(f"Tamaños fuera de 1..{MOONS_POOL_PER_CLASS - 1}: {bad}")
        elif self.sizes is not None:
            raise ValueError("sizes solo se usa en el barrido")
        return self

    @property
    def name(self) -> str:
        if self.sweep:
            return "moons-sweep"
        stem = self.dataset if self.dataset in BUILTIN_DATASETS else Path(self.dataset).stem
        return f"{stem}-{self.approach.value}"

    @property
    def seed(self) -> int:
        return self.train.seed

    @property
    def per_class(self) -> int:
        if self.train_per_class is not None:
            return self.train_per_class
        return DEFAULT_TRAIN_PER_CLASS.get(self.dataset, 10)

    def noise_model(self) -> Optional[NoiseModel]:
        return builtin_noise_model(self.noise) if self.noise else None

    def overlap_method(self) -> OverlapMethod:
        return OverlapMethod(
            kind=self.method,
            shots=self.shots,
            seed=derive_seed(self.seed, _KEY_EVAL),
            noise=self.noise_model(),
        )


class MetricsReport(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: str
    approach: str
    method: str
    noise: Optional[str] = None
    shots: Optional[int] = None
    n_test: int = Field(ge=1)
    accuracy: float = Field(ge=0.0, le=1.0)
    class_counts: List[int]
    per_class_accuracy: List[float]
    confusion: List[List[int]]
    cost_history_ref: Optional[str] = None
    seeds: Dict[str, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _reconcile(self):
        L = len(self.class_counts)
        if len(self.confusion) != L or any(len(r) != L for r in self.confusion):
            raise ValueError(f"La matriz de confusión debe ser {L}x{L}")
        if [sum(r) for r in self.confusion] != self.class_counts:
            raise ValueError("Las filas de la matriz de confusión no suman los conteos por clase")
        if sum(self.class_counts) != self.n_test:
            raise ValueError("Los conteos por clase no suman n_test")
        correct = sum(self.confusion[i][i] for i in range(L))
        if self.accuracy != correct / self.n_test:
            raise ValueError(f"accuracy={self.accuracy} no cuadra con la matriz ({correct}/{self.n_test})")
        return self


# -------------------- Datos --------------------
@dataclass(frozen=True)
class PreparedData:
    train: LabeledDataset
    test: LabeledDataset


def moons_pool(seed: int) -> PreparedData:
    """200 puntos de moons: 50/clase para muestrear entrenamientos y 50/clase de test fijo."""
    data = make_moons(MOONS_PER_CLASS, seed=seed)
    pool, test = split(data, SplitSpec(per_class_train=MOONS_POOL_PER_CLASS, seed=seed))
    return PreparedData(train=pool, test=test)


def prepare_data(spec: ExperimentSpec) -> PreparedData:
    seed = spec.seed
    if spec.dataset == "iris":
        train, test = split(load_iris(settings.iris_csv), SplitSpec(per_class_train=spec.per_class, seed=seed))
        return PreparedData(train, test)
    if spec.dataset == "circles":
        pool = make_circles(CIRCLES_POOL_PER_CLASS, seed=seed)
        train, _ = split(pool, SplitSpec(per_class_train=spec.per_class, seed=seed))
        fresh = make_circles(CIRCLES_TEST_PER_CLASS, seed=derive_seed(seed, _KEY_TEST_POOL))
        return PreparedData(train, rescale(fresh, pool.scaling))
    if spec.dataset == "moons":
        prepared = moons_pool(seed)
        sub_seed = derive_seed(seed, _KEY_SUBSET)
        train, _ = split(prepared.train, SplitSpec(per_class_train=spec.per_class, seed=sub_seed))
        return PreparedData(train, prepared.test)
    train, test = split(read_dataset_csv(spec.dataset), SplitSpec(per_class_train=spec.per_class, seed=seed))
    return PreparedData(train, test)


def build_model(approach: Objective, train: LabeledDataset) -> Model:
    if Objective(approach) == Objective.IMPLICIT:
        return ensembles_from_points(train.features, train.labels)
    return default_subspaces(train.n_classes)


# -------------------- Evaluación --------------------
def predict_test(
    params: EmbeddingParams,
    model: Model,
    test: LabeledDataset,
    method: OverlapMethod,
    n_jobs: Optional[int] = None,
) -> np.ndarray:
    if not method.sampled:
        return predict_many(test.features, params, model)
    jobs = settings.n_jobs if n_jobs is None else n_jobs
    # semilla por punto de test: no depende del número de workers
    preds = Parallel(n_jobs=jobs)(
        delayed(predict)(x, params, model, method.reseeded(i))
        for i, x in enumerate(test.features)
    )
    return np.asarray(preds, dtype=int)


def metrics_report(
    spec: ExperimentSpec,
    test: LabeledDataset,
    y_pred: np.ndarray,
    method: OverlapMethod,
    cost_history_ref: Optional[str] = None,
) -> MetricsReport:
    L = test.n_classes
    y_true = test.labels
    cm = confusion_matrix(y_true, y_pred, labels=list(range(L)))
    counts = cm.sum(axis=1)
    per_class = [float(cm[i, i] / counts[i]) if counts[i] else 0.0 for i in range(L)]
    return MetricsReport(
        experiment=spec.name,
        approach=spec.approach.value,
        method=method.kind.value,
        noise=method.noise.device_name if method.noise else None,
        shots=method.shots if method.sampled else None,
        n_test=len(test),
        accuracy=float(accuracy_score(y_true, y_pred)),
        class_counts=[int(c) for c in counts],
        per_class_accuracy=per_class,
        confusion=cm.astype(int).tolist(),
        cost_history_ref=cost_history_ref,
        seeds={"run": spec.seed, "eval": method.seed},
    )


def evaluate(
    spec: ExperimentSpec,
    params: EmbeddingParams,
    data: PreparedData,
    method: Optional[OverlapMethod] = None,
    cost_history_ref: Optional[str] = None,
) -> MetricsReport:
    method = method or spec.overlap_method()
    model = build_model(spec.approach, data.train)
    y_pred = predict_test(params, model, data.test, method)
    report = metrics_report(spec, data.test, y_pred, method, cost_history_ref)
    logger.info(
        "%s [%s%s]: accuracy %.4f (%d puntos)",
        spec.name,
        method.kind.value,
        f", {report.noise}" if report.noise else "",
        report.accuracy,
        report.n_test,
    )
    return report
