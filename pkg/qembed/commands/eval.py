from __future__ import annotations

import logging
from pathlib import Path

from ..repo.base import ensure_dir
from ..repo.records import TRAIN_RECORD_FILE, load_params, save_metrics
from ..utils.audit import audit_event
from .experiment import ExperimentSpec, MetricsReport, evaluate, prepare_data

logger = logging.getLogger(__name__)


def metrics_filename(spec: ExperimentSpec) -> str:
    """metrics_<método>[_<dispositivo>].json para que varias evaluaciones convivan."""
    suffix = f"_{spec.noise}" if spec.noise else ""
    return f"metrics_{spec.method.value}{suffix}.json"


def cmd_eval(spec: ExperimentSpec, params_path: str) -> MetricsReport:
    params = load_params(params_path)
    data = prepare_data(spec)

    src = Path(params_path)
    record = (src if src.is_dir() else src.parent) / TRAIN_RECORD_FILE
    report = evaluate(spec, params, data, cost_history_ref=str(record) if record.exists() else None)

    out = Path(spec.out_dir)
    ensure_dir(out)
    path = save_metrics(out / metrics_filename(spec), report)
    audit_event(
        "eval.completed",
        out_dir=str(out),
        details={
            "experiment": spec.name,
            "method": report.method,
            "noise": report.noise,
            "accuracy": report.accuracy,
            "metrics": str(path),
        },
    )
    return report
