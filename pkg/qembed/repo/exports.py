# qembed/repo/exports.py
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np

from ..config import settings
from ..core.datasets import FEATURE_RANGE, FeatureScaling, LabeledDataset
from ..core.overlap import GramMatrix
from .base import write_text


def _fmt(v: float) -> str:
    return f"{float(v):.{settings.csv_digits}g}"


def _csv_string(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=",", lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


# ---------------- Gram ----------------
def export_gram_csv(out_dir: Path | str, name: str, gram: GramMatrix) -> List[str]:
    """
    <name>.csv: matriz N×N, cabecera con el índice original de cada punto.
    <name>_labels.csv: index,label en el mismo orden que las filas.
    """
    out = Path(out_dir)
    header = [str(int(i)) for i in gram.indices]
    matrix = _csv_string(header, ([_fmt(v) for v in row] for row in gram.values))
    labels = _csv_string(["index", "label"], ([int(i), int(c)] for i, c in zip(gram.indices, gram.labels)))
    return [
        str(write_text(out / f"{name}.csv", matrix)),
        str(write_text(out / f"{name}_labels.csv", labels)),
    ]


# ---------------- Datasets ----------------
def export_dataset_csv(path: Path | str, data: LabeledDataset) -> str:
    """Features ya escaladas (ángulos en [0, π]) y etiqueta entera."""
    rows = ([_fmt(f[0]), _fmt(f[1]), int(y)] for f, y in zip(data.features, data.labels))
    return str(write_text(path, _csv_string(["f1", "f2", "label"], rows)))


def read_dataset_csv(path: Path | str, name: str | None = None) -> LabeledDataset:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"No existe el dataset {p}")
    feats: List[List[float]] = []
    labels: List[int] = []
    with p.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["f1", "f2", "label"]:
            raise ValueError(f"{p}: cabecera esperada 'f1,f2,label', encontrada {header}")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{p} fila {row_no}: se esperaban 3 columnas, hay {len(row)}")
            try:
                f1, f2, lab = float(row[0]), float(row[1]), int(row[2])
            except ValueError:
                raise ValueError(f"{p} fila {row_no}: valores no válidos {row}")
            if not (math.isfinite(f1) and math.isfinite(f2)):
                raise ValueError(f"{p} fila {row_no}: features no finitas")
            feats.append([f1, f2])
            labels.append(lab)
    if not feats:
        raise ValueError(f"{p}: sin filas de datos")
    X = np.asarray(feats)
    # el fichero ya guarda ángulos: escalado identidad
    lo, hi = FEATURE_RANGE
    identity = FeatureScaling.from_bounds(np.full(2, lo), np.full(2, hi))
    return LabeledDataset(name=name or p.stem, raw=X, features=X, labels=labels, scaling=identity)


# ---------------- Tablas ----------------
def export_sweep_csv(path: Path | str, rows: Iterable[Sequence]) -> str:
    body = ([int(s), a, _fmt(m), _fmt(sd)] for s, a, m, sd in rows)
    return str(write_text(path, _csv_string(["size", "approach", "mean_accuracy", "stddev"], body)))


def export_sweep_cells_csv(path: Path | str, rows: Iterable[Sequence]) -> str:
    body = ([int(s), a, int(r), int(seed), _fmt(acc)] for s, a, r, seed, acc in rows)
    return str(write_text(path, _csv_string(["size", "approach", "repeat", "seed", "accuracy"], body)))


def export_noise_table_csv(path: Path | str, rows: Iterable[Sequence]) -> str:
    body = ([d, a, m, _fmt(acc)] for d, a, m, acc in rows)
    return str(write_text(path, _csv_string(["device", "approach", "method", "accuracy"], body)))
