from pathlib import Path

import numpy as np
import orjson
import pytest

from qembed.commands.experiment import ExperimentSpec, MetricsReport, prepare_data
from qembed.config import settings
from qembed.main import main
from qembed.repo.base import read_jsonl
from qembed.utils.seeds import derive_seed

FAST = ["--epochs", "2"]


def _read(path) -> bytes:
    return Path(path).read_bytes()


def _audit_events():
    logs = Path(settings.data_dir) / "logs"
    return [r["event"] for f in sorted(logs.glob("audit_*.jsonl")) for r in read_jsonl(f)]


def test_devices_writes_models(tmp_path, capsys):
    assert main(["devices", "--out", str(tmp_path / "dev")]) == 0
    assert sorted(p.name for p in (tmp_path / "dev").glob("*.json")) == [
        "bogota.json", "melbourne.json", "rome.json", "yorktown.json"
    ]
    assert "melbourne" in capsys.readouterr().out


def test_train_writes_record_and_params(tmp_path):
    out = tmp_path / "iris"
    assert main(["train", *FAST, "--out", str(out)]) == 0
    record = orjson.loads(_read(out / "train_record.json"))
    assert len(record["cost_history"]) == 3
    assert record["wall_time_s"] is None
    assert record["experiment"] == "iris-implicit"
    assert len(orjson.loads(_read(out / "params.json"))["thetas"]) == 20
    assert "train.completed" in _audit_events()


def test_train_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["train", *FAST, "--seed", "4", "--out", str(tmp_path / name)]) == 0
    for f in ("train_record.json", "params.json"):
        assert _read(tmp_path / "a" / f) == _read(tmp_path / "b" / f)


def test_sweep_is_byte_identical(tmp_path):
    args = ["sweep", "--sizes", "2,3", "--repeats", "2", "--epochs", "1"]
    for name in ("a", "b"):
        assert main([*args, "--out", str(tmp_path / name)]) == 0
    for f in ("sweep.csv", "sweep_cells.csv"):
        assert _read(tmp_path / "a" / f) == _read(tmp_path / "b" / f)
    lines = _read(tmp_path / "a" / "sweep.csv").decode().splitlines()
    assert lines[0] == "size,approach,mean_accuracy,stddev"
    assert [l.split(",")[:2] for l in lines[1:]] == [
        ["2", "implicit"], ["2", "explicit"], ["3", "implicit"], ["3", "explicit"]
    ]
    cells = _read(tmp_path / "a" / "sweep_cells.csv").decode().splitlines()
    assert len(cells) == 1 + 2 * 2 * 2
    assert b"\r" not in _read(tmp_path / "a" / "sweep.csv")
    assert "sweep.completed" in _audit_events()


def test_sweep_cells_share_seeds_across_approaches(tmp_path):
    assert main(["sweep", "--sizes", "2", "--repeats", "2", "--epochs", "1", "--out", str(tmp_path)]) == 0
    rows = [l.split(",") for l in (tmp_path / "sweep_cells.csv").read_text().splitlines()[1:]]
    seeds = {(r[1], r[2]): r[3] for r in rows}
    assert seeds[("implicit", "0")] == seeds[("explicit", "0")]
    assert seeds[("implicit", "0")] != seeds[("implicit", "1")]


def test_eval_after_train(tmp_path):
    out = tmp_path / "run"
    assert main(["train", *FAST, "--out", str(out)]) == 0
    assert main(["eval", *FAST, "--params", str(out / "params.json"), "--out", str(out)]) == 0
    report = MetricsReport.model_validate(orjson.loads(_read(out / "metrics_exact.json")))
    assert report.n_test == 120
    assert report.class_counts == [40, 40, 40]
    assert sum(map(sum, report.confusion)) == 120
    assert report.cost_history_ref.endswith("train_record.json")
    assert "eval.completed" in _audit_events()


def test_eval_sampled_with_noise(tmp_path):
    out = tmp_path / "run"
    assert main(["train", *FAST, "--dataset", "circles", "--approach", "explicit", "--out", str(out)]) == 0
    args = ["eval", "--dataset", "circles", "--approach", "explicit", "--method", "inversion",
            "--noise", "rome", "--shots", "256", "--params", str(out), "--out", str(out)]
    assert main(args) == 0
    data = orjson.loads(_read(out / "metrics_inversion_rome.json"))
    assert data["noise"] == "rome" and data["shots"] == 256
    assert data["n_test"] == 100


def test_gram_before_and_after(tmp_path):
    out = tmp_path / "g"
    assert main(["train", *FAST, "--out", str(out)]) == 0
    assert main(["gram", "--stage", "before", "--out", str(out)]) == 0
    assert main(["gram", "--stage", "after", "--params", str(out / "train_record.json"), "--out", str(out)]) == 0
    lines = (out / "gram_after.csv").read_text().splitlines()
    values = np.array([[float(v) for v in l.split(",")] for l in lines[1:]])
    assert values.shape == (30, 30)
    assert np.allclose(np.diag(values), 1.0, atol=1e-8)
    labels = (out / "gram_after_labels.csv").read_text().splitlines()
    assert labels[0] == "index,label" and len(labels) == 31
    assert _read(out / "gram_before.csv") != _read(out / "gram_after.csv")
    assert "gram.written" in _audit_events()


def test_gram_before_depends_on_seed(tmp_path):
    assert main(["gram", "--stage", "before", "--seed", "1", "--out", str(tmp_path / "a")]) == 0
    assert main(["gram", "--stage", "before", "--seed", "2", "--out", str(tmp_path / "b")]) == 0
    assert _read(tmp_path / "a" / "gram_before.csv") != _read(tmp_path / "b" / "gram_before.csv")


def test_dataset_command_and_csv_dataset(tmp_path):
    out = tmp_path / "d"
    assert main(["dataset", "--dataset", "moons", "--out", str(out)]) == 0
    assert (out / "train.csv").read_text().splitlines()[0] == "f1,f2,label"
    assert len((out / "test.csv").read_text().splitlines()) == 101
    assert main(["train", *FAST, "--dataset", str(out / "train.csv"), "--train-per-class", "5",
                 "--out", str(tmp_path / "t")]) == 0


def test_table_rows(tmp_path):
    out = tmp_path / "t"
    assert main(["train", "--epochs", "1", "--dataset", "circles", "--approach", "explicit", "--out", str(out)]) == 0
    assert main(["table", "--dataset", "circles", "--approach", "explicit", "--shots", "64",
                 "--params", str(out), "--out", str(out)]) == 0
    lines = (out / "noise_table.csv").read_text().splitlines()
    assert lines[0] == "device,approach,method,accuracy"
    assert [l.split(",")[0] for l in lines[1:]] == ["ideal", "melbourne", "yorktown", "bogota", "rome"]


@pytest.mark.parametrize(
    "argv",
    [
        ["train", "--approach", "nope"],
        ["train", "--epochs", "0"],
        ["train", "--lr", "-1"],
        ["train", "--seed", "-1"],
        ["dataset", "--dataset", "circles", "--seed", "-3"],
        ["eval"],
        ["train", "--noise", "rome"],
        ["train", "--dataset", "iris", "--train-per-class", "50"],
        ["sweep", "--sizes", "50"],
        ["sweep", "--sizes", "a,b"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_1(argv, tmp_path):
    assert main([*argv, "--out", str(tmp_path)] if argv[0] != "frobnicate" else argv) == 1


def test_missing_params_exit_2(tmp_path):
    assert main(["eval", "--params", str(tmp_path / "nada.json"), "--out", str(tmp_path)]) == 2


def test_divergence_exit_2(tmp_path, monkeypatch):
    from qembed.core import optim

    monkeypatch.setattr(optim, "make_cost_fn", lambda *a, **k: (lambda theta: float("nan")))
    assert main(["train", *FAST, "--out", str(tmp_path)]) == 2
    assert "train.diverged" in _audit_events()


def test_metrics_report_must_reconcile():
    base = dict(
        experiment="x", approach="implicit", method="exact", n_test=4,
        class_counts=[2, 2], per_class_accuracy=[1.0, 0.5], confusion=[[2, 0], [1, 1]],
    )
    assert MetricsReport(accuracy=0.75, **base).accuracy == 0.75
    with pytest.raises(ValueError):
        MetricsReport(accuracy=0.5, **base)
    with pytest.raises(ValueError):
        MetricsReport(accuracy=0.75, **{**base, "class_counts": [3, 1]})


def test_experiment_spec_defaults():
    spec = ExperimentSpec(dataset="circles", approach="explicit")
    assert spec.name == "circles-explicit"
    assert spec.per_class == 15
    data = prepare_data(spec)
    assert len(data.train) == 30 and len(data.test) == 100
    with pytest.raises(ValueError):
        ExperimentSpec(sweep=True, dataset="moons")


@pytest.mark.parametrize("seed", ["0", "7", "4294967295", "123456789012"])
def test_circles_dataset_any_seed(tmp_path, seed):
    out = tmp_path / "c"
    assert main(["dataset", "--dataset", "circles", "--seed", seed, "--out", str(out)]) == 0
    assert len((out / "train.csv").read_text().splitlines()) == 31
    assert len((out / "test.csv").read_text().splitlines()) == 101


def test_circles_explicit_train_and_eval(tmp_path):
    out = tmp_path / "c"
    args = ["--dataset", "circles", "--approach", "explicit", "--seed", "3", "--out", str(out)]
    assert main(["train", "--epochs", "1", *args]) == 0
    assert main(["eval", "--params", str(out), *args]) == 0
    report = MetricsReport.model_validate(orjson.loads(_read(out / "metrics_exact.json")))
    assert report.n_test == 100 and report.class_counts == [50, 50]


def test_derived_seeds_fit_random_state():
    for seed in (0, 1, 2**32 - 1, 2**62):
        for keys in [(), (1,), (3, 2, 1)]:
            assert 0 <= derive_seed(seed, *keys) < 2**32
    assert derive_seed(5, 1) == derive_seed(5, 1)
    assert derive_seed(5, 1) != derive_seed(5, 2)
