from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from ..config import settings
from ..core.embedding import EmbeddingParams
from ..core.overlap import GramMatrix, gram_matrix
from ..repo.base import ensure_dir
from ..repo.exports import export_gram_csv
from ..repo.records import load_params
from ..utils.audit import audit_event
from .experiment import ExperimentSpec, prepare_data

logger = logging.getLogger(__name__)

STAGES = ("before", "after")


def cmd_gram(spec: ExperimentSpec, params_path: Optional[str], stage: str = "after") -> GramMatrix:
    """
    Solapamientos entre los puntos de entrenamiento.
    before: θ aleatorio con la semilla del experimento; after: θ entrenado.
    """
    if stage not in STAGES:
        raise ValueError(f"stage debe ser uno de {STAGES}, recibido {stage!r}")
    if stage == "before":
        params = EmbeddingParams.random(spec.seed)
    else:
        if not params_path:
            raise ValueError("gram --stage after necesita --params")
        params = load_params(params_path)

    data = prepare_data(spec)
    method = spec.overlap_method()
    gram = gram_matrix(data.train.features, data.train.labels, params, method, n_jobs=settings.n_jobs)

    out = Path(spec.out_dir)
    ensure_dir(out)
    files = export_gram_csv(out, f"gram_{stage}", gram)

    L = data.train.n_classes
    blocks = {f"{a}-{b}": gram.block_mean(a, b) for a in range(L) for b in range(a, L)}
    logger.info("%s gram %s: medias por bloque %s", spec.name, stage, blocks)
    audit_event(
        "gram.written",
        out_dir=str(out),
        details={"experiment": spec.name, "stage": stage, "size": gram.size, "block_means": blocks, "files": files},
    )
    return gram
