from __future__ import annotations

import logging
from pathlib import Path
from typing import List

from ..repo.base import ensure_dir
from ..repo.exports import export_dataset_csv
from .experiment import ExperimentSpec, prepare_data

logger = logging.getLogger(__name__)


def cmd_dataset(spec: ExperimentSpec) -> List[str]:
    """Escribe train.csv y test.csv con los datos exactos que usa el experimento."""
    data = prepare_data(spec)
    out = Path(spec.out_dir)
    ensure_dir(out)
    files = [
        export_dataset_csv(out / "train.csv", data.train),
        export_dataset_csv(out / "test.csv", data.test),
    ]
    logger.info("%s: %d puntos de entrenamiento, %d de test", spec.name, len(data.train), len(data.test))
    return files
