"""
Barrido de moons con pocos datos: para cada tamaño y enfoque se entrenan
`repeats` modelos sobre subconjuntos aleatorios del pool y se evalúan sobre
el test fijo de 50 puntos por clase.
"""
from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import List, Tuple

import numpy as np
from joblib import Parallel, delayed
from sklearn.metrics import accuracy_score

from ..config import settings
from ..core.datasets import LabeledDataset, SplitSpec, split
from ..core.objectives import default_subspaces, ensembles_from_points, predict_many
from ..core.optim import Objective, TrainConfig, train
from ..repo.base import ensure_dir
from ..repo.exports import export_sweep_cells_csv, export_sweep_csv
from ..utils.audit import audit_event
from ..utils.seeds import derive_seed
from .experiment import ExperimentSpec, moons_pool

logger = logging.getLogger(__name__)

APPROACHES = (Objective.IMPLICIT, Objective.EXPLICIT)
SWEEP_FILE = "sweep.csv"
CELLS_FILE = "sweep_cells.csv"

# (size, approach, repeat, subset_seed, accuracy)
Cell = Tuple[int, str, int, int, float]


def cell_seeds(seed: int, size: int, repeat: int) -> Tuple[int, int]:
    """Semillas de subconjunto y de θ inicial; compartidas por ambos enfoques."""
    return derive_seed(seed, size, repeat), derive_seed(seed, size, repeat, 1)


def run_cell(
    pool: LabeledDataset,
    test: LabeledDataset,
    size: int,
    approach: Objective,
    repeat: int,
    seed: int,
    base: TrainConfig,
) -> Cell:
    subset_seed, init_seed = cell_seeds(seed, size, repeat)
    train_set, _ = split(pool, SplitSpec(per_class_train=size, seed=subset_seed))
    ensembles = ensembles_from_points(train_set.features, train_set.labels)
    subspaces = default_subspaces(train_set.n_classes) if approach == Objective.EXPLICIT else None
    record = train(approach, ensembles, base.model_copy(update={"seed": init_seed}), subspaces=subspaces)

    model = ensembles if approach == Objective.IMPLICIT else subspaces
    y_pred = predict_many(test.features, record.final_params, model)
    acc = float(accuracy_score(test.labels, y_pred))
    logger.debug("sweep size=%d %s repeat=%d: %.4f", size, approach.value, repeat, acc)
    return size, approach.value, repeat, subset_seed, acc


def summarize(cells: List[Cell], sizes: List[int]) -> List[Tuple[int, str, float, float]]:
    rows = []
    for size in sizes:
        for approach in APPROACHES:
            accs = np.array([c[4] for c in cells if c[0] == size and c[1] == approach.value])
            # desviación poblacional (ddof=0)
            rows.append((size, approach.value, float(accs.mean()), float(accs.std())))
    return rows


def cmd_moons_sweep(spec: ExperimentSpec) -> List[Tuple[int, str, float, float]]:
    if not spec.sweep:
        spec = ExperimentSpec.model_validate({**spec.model_dump(), "sweep": True})
    sizes = list(spec.sizes)
    prepared = moons_pool(spec.seed)

    t0 = time.perf_counter()
    # orden de filas fijo por (tamaño, enfoque, repetición); Parallel conserva el orden de envío
    cells: List[Cell] = Parallel(n_jobs=settings.n_jobs)(
        delayed(run_cell)(prepared.train, prepared.test, size, approach, r, spec.seed, spec.train)
        for size in sizes
        for approach in APPROACHES
        for r in range(spec.repeats)
    )
    wall = time.perf_counter() - t0
    rows = summarize(cells, sizes)

    out = Path(spec.out_dir)
    ensure_dir(out)
    summary_path = export_sweep_csv(out / SWEEP_FILE, rows)
    cells_path = export_sweep_cells_csv(out / CELLS_FILE, cells)
    for size, approach, mean, sd in rows:
        logger.info("moons size=%d %-8s media %.4f ± %.4f", size, approach, mean, sd)
    audit_event(
        "sweep.completed",
        out_dir=str(out),
        wall_time_s=wall,
        details={
            "sizes": sizes,
            "repeats": spec.repeats,
            "seed": spec.seed,
            "files": [summary_path, cells_path],
        },
    )
    return rows
