from __future__ import annotations

import logging
from pathlib import Path

from ..config import settings
from ..core.objectives import default_subspaces, ensembles_from_points
from ..core.optim import NonFiniteCostError, Objective, TrainRecord, train
from ..repo.base import ensure_dir
from ..repo.records import save_params, save_train_record
from ..utils.audit import audit_event
from .experiment import ExperimentSpec, prepare_data

logger = logging.getLogger(__name__)


def run_training(spec: ExperimentSpec) -> TrainRecord:
    """Prepara los datos y entrena sin escribir nada en disco."""
    data = prepare_data(spec)
    ensembles = ensembles_from_points(data.train.features, data.train.labels)
    subspaces = default_subspaces(data.train.n_classes) if spec.approach == Objective.EXPLICIT else None
    record = train(spec.approach, ensembles, spec.train, subspaces=subspaces)
    record.meta.update({
        "experiment": spec.name,
        "dataset": spec.dataset,
        "train_per_class": spec.per_class,
        "n_train": len(data.train),
        "n_test": len(data.test),
        "scaling": data.train.scaling.to_dict(),
    })
    return record


def cmd_train(spec: ExperimentSpec) -> TrainRecord:
    out = Path(spec.out_dir)
    ensure_dir(out)
    try:
        record = run_training(spec)
    except NonFiniteCostError as e:
        audit_event(
            "train.diverged",
            out_dir=str(out),
            details={"experiment": spec.name, "epoch": e.epoch, "seed": spec.seed},
        )
        raise

    record_path = save_train_record(out, record, include_wall_time=settings.record_wall_time)
    params_path = save_params(out, record.final_params, {"experiment": spec.name, "seed": spec.seed})
    logger.info(
        "%s: coste %.6f -> %.6f en %d épocas (%s)",
        spec.name,
        record.cost_history[0],
        record.cost_history[-1],
        spec.train.epochs,
        record_path,
    )
    audit_event(
        "train.completed",
        out_dir=str(out),
        wall_time_s=record.wall_time,
        details={
            "experiment": spec.name,
            "seed": spec.seed,
            "epochs": spec.train.epochs,
            "initial_cost": record.cost_history[0],
            "final_cost": record.cost_history[-1],
            "params": str(params_path),
        },
    )
    return record
