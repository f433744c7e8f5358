import numpy as np
import pytest

from qembed.config import settings


@pytest.fixture(autouse=True)
def _datos_tmp(tmp_path, monkeypatch):
    # cada test escribe en su propia carpeta de datos
    monkeypatch.setattr(settings, "data_dir", str(tmp_path / "Datos"))
    monkeypatch.setattr(settings, "record_wall_time", False)
    monkeypatch.setattr(settings, "n_jobs", 1)
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_points(rng, n):
    return rng.uniform(0.0, np.pi, size=(n, 2))


def random_thetas(rng):
    return rng.uniform(0.0, 2 * np.pi, size=20)
