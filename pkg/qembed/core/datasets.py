"""
Datos: Iris (CSV o copia incluida en scikit-learn), make_circles y make_moons,
escalado min-max a [0, π] y partición train/test por clase.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from sklearn import datasets as sk_datasets
from sklearn.preprocessing import MinMaxScaler

from ..utils.seeds import legacy_seed

FEATURE_RANGE = (0.0, math.pi)

# columnas petal length / petal width del formato estándar de 5 columnas
IRIS_FEATURES = (2, 3)
IRIS_ROWS = 150
IRIS_PER_CLASS = 50
IRIS_SPECIES: Dict[str, int] = {
    "setosa": 0,
    "iris-setosa": 0,
    "versicolor": 1,
    "iris-versicolor": 1,
    "virginica": 2,
    "iris-virginica": 2,
}


# -------------------- Tipos --------------------
@dataclass(frozen=True)
class FeatureScaling:
    """Min-max a FEATURE_RANGE con un MinMaxScaler ya ajustado; guarda el (min, max) por feature."""

    scaler: MinMaxScaler

    @classmethod
    def fit(cls, raw: np.ndarray) -> "FeatureScaling":
        X = np.asarray(raw, dtype=float).reshape(-1, 2)
        return cls(MinMaxScaler(feature_range=FEATURE_RANGE).fit(X))

    @classmethod
    def from_bounds(cls, mins, maxs) -> "FeatureScaling":
        return cls.fit(np.vstack([np.asarray(mins, dtype=float), np.asarray(maxs, dtype=float)]))

    @property
    def mins(self) -> np.ndarray:
        return self.scaler.data_min_

    @property
    def maxs(self) -> np.ndarray:
        return self.scaler.data_max_

    def apply(self, raw: np.ndarray) -> np.ndarray:
        # feature constante -> FEATURE_RANGE[0]
        return self.scaler.transform(np.asarray(raw, dtype=float).reshape(-1, 2))

    def to_dict(self) -> Dict[str, List[float]]:
        return {"min": [float(v) for v in self.mins], "max": [float(v) for v in self.maxs]}


@dataclass(frozen=True)
class LabeledDataset:
    name: str
    raw: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    scaling: FeatureScaling

    def __post_init__(self) -> None:
        raw = np.asarray(self.raw, dtype=float).reshape(-1, 2)
        feats = np.asarray(self.features, dtype=float).reshape(-1, 2)
        y = np.asarray(self.labels, dtype=int).reshape(-1)
        if not (raw.shape[0] == feats.shape[0] == y.shape[0]):
            raise ValueError("raw, features y labels deben tener la misma longitud")
        if y.shape[0] == 0:
            raise ValueError(f"El dataset {self.name!r} está vacío")
        classes = sorted(set(y.tolist()))
        if classes != list(range(len(classes))):
            raise ValueError(f"Las etiquetas deben ser contiguas 0..L-1, encontradas {classes}")
        for arr in (raw, feats, y):
            arr.setflags(write=False)
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1

    def class_counts(self) -> List[int]:
        return np.bincount(self.labels, minlength=self.n_classes).tolist()

    def subset(self, indices, name: Optional[str] = None) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=int)
        return LabeledDataset(
            name=name or self.name,
            raw=self.raw[idx],
            features=self.features[idx],
            labels=self.labels[idx],
            scaling=self.scaling,
        )


class SplitSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    per_class_train: int = Field(ge=1)
    seed: int = Field(default=0, ge=0)


def from_raw(name: str, raw, labels, scaling: Optional[FeatureScaling] = None) -> LabeledDataset:
    raw = np.asarray(raw, dtype=float).reshape(-1, 2)
    scaling = scaling or FeatureScaling.fit(raw)
    return LabeledDataset(name=name, raw=raw, features=scaling.apply(raw), labels=labels, scaling=scaling)


def rescale(data: LabeledDataset, scaling: FeatureScaling) -> LabeledDataset:
    """Mismo dataset escalado con el (min, max) de otro (p. ej. el de entrenamiento)."""
    return from_raw(data.name, data.raw, data.labels, scaling)


# -------------------- Iris --------------------
def _parse_label(value: str, row_no: int) -> int:
    v = value.strip().lower()
    if v in IRIS_SPECIES:
        return IRIS_SPECIES[v]
    try:
        lab = int(float(v))
    except ValueError:
        raise ValueError(f"Fila {row_no}: especie desconocida {value!r}")
    if lab not in (0, 1, 2):
        raise ValueError(f"Fila {row_no}: etiqueta {lab} fuera de 0..2")
    return lab


def _read_iris_rows(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    feats: List[List[float]] = []
    labels: List[int] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 5:
                raise ValueError(f"Fila {row_no}: se esperaban 5 columnas, hay {len(row)}")
            try:
                values = [float(c) for c in row[:4]]
            except ValueError:
                if row_no == 1:
                    continue  # cabecera
                raise ValueError(f"Fila {row_no}: valores no numéricos {row[:4]}")
            feats.append(values)
            labels.append(_parse_label(row[4], row_no))
    if not feats:
        raise ValueError(f"{path}: sin filas de datos")
    return np.asarray(feats), np.asarray(labels, dtype=int)


def load_iris(csv_path: Optional[str] = None) -> LabeledDataset:
    """
    Iris con petal length / petal width escaladas a [0, π].
    Sin ruta se usa la copia del dataset que trae scikit-learn.
    """
    if csv_path:
        feats4, labels = _read_iris_rows(Path(csv_path))
        counts = np.bincount(labels, minlength=3).tolist()
        if len(labels) != IRIS_ROWS or counts != [IRIS_PER_CLASS] * 3:
            raise ValueError(
                f"{csv_path}: Iris debe tener {IRIS_ROWS} filas, {IRIS_PER_CLASS} por especie; hay {len(labels)} {counts}"
            )
    else:
        bunch = sk_datasets.load_iris()
        feats4, labels = np.asarray(bunch.data, dtype=float), np.asarray(bunch.target, dtype=int)
    raw = feats4[:, list(IRIS_FEATURES)]
    return from_raw("iris", raw, labels)


# -------------------- Generadores --------------------
def make_circles(n_per_class: int = 65, noise_sd: float = 0.1, factor: float = 0.5, seed: int = 0) -> LabeledDataset:
    """Clase 0 en el círculo unidad, clase 1 en el de radio `factor`."""
    if n_per_class < 1:
        raise ValueError("n_per_class debe ser >= 1")
    if not 0.0 < factor < 1.0:
        raise ValueError(f"factor debe estar en (0, 1), recibido {factor}")
    if noise_sd < 0:
        raise ValueError("noise_sd no puede ser negativo")
    raw, y = sk_datasets.make_circles(
        n_samples=(n_per_class, n_per_class),
        noise=noise_sd or None,
        factor=factor,
        shuffle=True,
        random_state=legacy_seed(seed),
    )
    return from_raw("circles", raw, y)


def make_moons(n_per_class: int = 100, noise_sd: float = 0.1, seed: int = 0) -> LabeledDataset:
    """Clase 0: (cos t, sin t); clase 1: (1 - cos t, 0.5 - sin t); t en [0, π]."""
    if n_per_class < 1:
        raise ValueError("n_per_class debe ser >= 1")
    if noise_sd < 0:
        raise ValueError("noise_sd no puede ser negativo")
    raw, y = sk_datasets.make_moons(
        n_samples=(n_per_class, n_per_class),
        noise=noise_sd or None,
        shuffle=True,
        random_state=legacy_seed(seed),
    )
    return from_raw("moons", raw, y)


# -------------------- Partición --------------------
def split(data: LabeledDataset, spec: SplitSpec) -> Tuple[LabeledDataset, LabeledDataset]:
    """Por clase, `per_class_train` puntos sin reemplazo; el resto es test."""
    counts = data.class_counts()
    if spec.per_class_train >= min(counts):
        raise ValueError(
            f"per_class_train={spec.per_class_train} debe ser menor que la clase más pequeña ({min(counts)})"
        )
    rng = np.random.default_rng(spec.seed)
    train_idx: List[np.ndarray] = []
    for c in range(data.n_classes):
        idx = np.flatnonzero(data.labels == c)
        train_idx.append(np.sort(rng.choice(idx, size=spec.per_class_train, replace=False)))
    train = np.concatenate(train_idx)
    test = np.setdiff1d(np.arange(len(data)), train)
    return data.subset(train, f"{data.name}-train"), data.subset(test, f"{data.name}-test")
