import numpy as np
import orjson
import pytest

from qembed.core.datasets import make_moons
from qembed.core.embedding import EmbeddingParams
from qembed.core.overlap import gram_matrix
from qembed.repo.base import append_jsonl, read_json, read_jsonl, write_json
from qembed.repo.exports import export_dataset_csv, export_gram_csv, read_dataset_csv
from qembed.repo.records import load_params, save_params


def test_write_json_is_sorted_and_stable(tmp_path):
    p = write_json(tmp_path / "a.json", {"b": 1, "a": np.float64(0.5)})
    assert p.read_bytes() == b'{\n  "a": 0.5,\n  "b": 1\n}\n'
    assert read_json(p) == {"a": 0.5, "b": 1}
    assert read_json(tmp_path / "nada.json", default={}) == {}


def test_jsonl_append_and_read(tmp_path):
    p = tmp_path / "logs" / "x.jsonl"
    append_jsonl(p, {"n": 1})
    append_jsonl(p, {"n": 2})
    assert [r["n"] for r in read_jsonl(p)] == [1, 2]
    assert list(read_jsonl(tmp_path / "nada.jsonl")) == []


def test_params_round_trip(tmp_path):
    params = EmbeddingParams.random(8)
    save_params(tmp_path, params)
    assert np.array_equal(load_params(tmp_path).thetas, params.thetas)
    assert np.array_equal(load_params(tmp_path / "params.json").thetas, params.thetas)


def test_load_params_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_params(tmp_path / "nada.json")
    (tmp_path / "bad.json").write_bytes(orjson.dumps({"otra": 1}))
    with pytest.raises(ValueError):
        load_params(tmp_path / "bad.json")
    (tmp_path / "short.json").write_bytes(orjson.dumps({"thetas": [0.0] * 3}))
    with pytest.raises(ValueError):
        load_params(tmp_path / "short.json")


def test_dataset_csv_round_trip(tmp_path):
    data = make_moons(10, seed=0)
    path = export_dataset_csv(tmp_path / "m.csv", data)
    back = read_dataset_csv(path)
    assert np.allclose(back.features, data.features, rtol=1e-8)
    assert np.array_equal(back.labels, data.labels)
    # el fichero guarda ángulos: se leen tal cual
    assert np.array_equal(back.features, back.raw)


@pytest.mark.parametrize(
    "text",
    ["x,y,label\n1,2,0\n", "f1,f2,label\n1,2\n", "f1,f2,label\n1,a,0\n", "f1,f2,label\n", "f1,f2,label\n1,2,0\n1,2,2\n"],
)
def test_dataset_csv_errors(tmp_path, text):
    p = tmp_path / "d.csv"
    p.write_text(text, encoding="utf-8")
    with pytest.raises(ValueError):
        read_dataset_csv(p)


def test_gram_csv_files(tmp_path):
    X = np.array([[0.1, 0.2], [1.0, 2.0], [2.0, 0.5]])
    gram = gram_matrix(X, [1, 0, 1], EmbeddingParams.random(0))
    matrix_path, labels_path = export_gram_csv(tmp_path, "gram_after", gram)
    lines = open(matrix_path, encoding="utf-8").read().splitlines()
    assert lines[0] == "1,0,2"
    assert len(lines) == 4
    assert open(labels_path, encoding="utf-8").read() == "index,label\n1,0\n0,1\n2,1\n"
