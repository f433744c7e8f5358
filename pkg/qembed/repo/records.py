from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional

from ..core.embedding import EmbeddingParams
from ..core.noise import NoiseModel
from ..core.optim import TrainRecord
from .base import read_json, write_json

TRAIN_RECORD_FILE = "train_record.json"
PARAMS_FILE = "params.json"


# ---------- entrenamiento ----------
def save_train_record(out_dir: Path | str, record: TrainRecord, include_wall_time: bool = False) -> Path:
    return write_json(Path(out_dir) / TRAIN_RECORD_FILE, record.to_dict(include_wall_time))


def save_params(out_dir: Path | str, params: EmbeddingParams, extra: Optional[Dict[str, Any]] = None) -> Path:
    data = {"thetas": params.to_list(), **(extra or {})}
    return write_json(Path(out_dir) / PARAMS_FILE, data)


def load_params(path: Path | str) -> EmbeddingParams:
    """
    Acepta params.json ({"thetas": [...]}) o un train_record.json
    ({"final_params": [...]}). Un directorio se resuelve a su params.json.
    """
    p = Path(path)
    if p.is_dir():
        p = p / PARAMS_FILE
    data = read_json(p)
    if data is None:
        raise FileNotFoundError(f"No existe el fichero de parámetros {p}")
    if not isinstance(data, dict):
        raise ValueError(f"{p}: se esperaba un objeto JSON")
    thetas = data.get("thetas", data.get("final_params"))
    if thetas is None:
        raise ValueError(f"{p}: falta 'thetas' o 'final_params'")
    return EmbeddingParams(thetas)


# ---------- métricas ----------
def save_metrics(path: Path | str, report) -> Path:
    return write_json(path, report.model_dump(mode="json"))


# ---------- modelos de ruido ----------
def save_noise_model(path: Path | str, model: NoiseModel) -> Path:
    return write_json(path, model.model_dump(mode="json"))


def load_noise_model(path: Path | str) -> NoiseModel:
    data = read_json(path)
    if data is None:
        raise FileNotFoundError(f"No existe el modelo de ruido {path}")
    return NoiseModel.model_validate(data)
