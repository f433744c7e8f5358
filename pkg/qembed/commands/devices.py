from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Tuple

from ..core.noise import DEVICE_NAMES, NoiseModel, builtin_noise_model
from ..core.optim import Objective
from ..core.overlap import OverlapKind
from ..repo.base import ensure_dir
from ..repo.exports import export_noise_table_csv
from ..repo.records import load_params, save_noise_model
from ..utils.audit import audit_event
from .experiment import ExperimentSpec, evaluate, prepare_data

logger = logging.getLogger(__name__)

TABLE_FILE = "noise_table.csv"

# (device, approach, method, accuracy)
TableRow = Tuple[str, str, str, float]


# -------------------- devices --------------------
def cmd_devices(out_dir: Optional[str] = None) -> List[NoiseModel]:
    models = [builtin_noise_model(d) for d in DEVICE_NAMES]
    for m in models:
        print(
            f"{m.device_name:<10} u1={m.u1_error:.5f} u2={m.u2_error:.5f} u3={m.u3_error:.5f} "
            f"readout={m.readout_error:.5f} cnot={m.cnot_error:.5f}"
        )
    if out_dir:
        out = Path(out_dir)
        ensure_dir(out)
        for m in models:
            save_noise_model(out / f"{m.device_name}.json", m)
    return models


# -------------------- table --------------------
def _table_methods(approach: Objective) -> List[OverlapKind]:
    # en el enfoque explícito el método solo indica medir el circuito en la base computacional
    if approach == Objective.IMPLICIT:
        return [OverlapKind.SWAP_TEST, OverlapKind.INVERSION_TEST]
    return [OverlapKind.INVERSION_TEST]


def _method_label(approach: Objective, kind: OverlapKind) -> str:
    return kind.value if approach == Objective.IMPLICIT else "measure"


def cmd_table(spec: ExperimentSpec, params_path: str, devices: Optional[List[str]] = None) -> List[TableRow]:
    """
    Precisión de test en simulación ideal y con cada modelo de ruido:
    fila 'ideal' exacta y, por dispositivo, un método muestreado por fila.
    """
    params = load_params(params_path)
    data = prepare_data(spec)
    names = devices or DEVICE_NAMES
    approach = spec.approach

    rows: List[TableRow] = []
    ideal = spec.model_copy(update={"method": OverlapKind.EXACT, "noise": None})
    rows.append(("ideal", approach.value, "exact", evaluate(ideal, params, data).accuracy))
    for name in names:
        builtin_noise_model(name)
        for kind in _table_methods(approach):
            cell = ExperimentSpec.model_validate({**spec.model_dump(), "method": kind, "noise": name})
            report = evaluate(cell, params, data)
            rows.append((report.noise, approach.value, _method_label(approach, kind), report.accuracy))

    out = Path(spec.out_dir)
    ensure_dir(out)
    path = export_noise_table_csv(out / TABLE_FILE, rows)
    audit_event(
        "eval.completed",
        out_dir=str(out),
        details={"experiment": spec.name, "table": path, "rows": len(rows)},
    )
    return rows
