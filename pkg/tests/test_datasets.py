import numpy as np
import pytest
from sklearn import datasets as sk_datasets
from sklearn.preprocessing import MinMaxScaler

from qembed.core.datasets import (
    SplitSpec,
    from_raw,
    load_iris,
    make_circles,
    make_moons,
    rescale,
    split,
)


def test_bundled_iris_shape_and_scaling():
    data = load_iris()
    assert len(data) == 150
    assert data.class_counts() == [50, 50, 50]
    assert data.features.min() >= 0.0 and data.features.max() <= np.pi
    i = int(np.argmin(data.raw[:, 0]))
    assert data.features[i, 0] == 0.0
    assert np.isclose(data.features[:, 0].max(), np.pi)


def test_scaling_reproduces_features():
    data = load_iris()
    assert np.array_equal(data.scaling.apply(data.raw), data.features)


def _write_iris_csv(path, n_rows=None):
    bunch = sk_datasets.load_iris()
    names = ["Iris-setosa", "versicolor", "2"]
    rows = ["sepal_length,sepal_width,petal_length,petal_width,species"]
    rows += [",".join(f"{v:.1f}" for v in x) + f",{names[y]}" for x, y in zip(bunch.data, bunch.target)]
    rows = rows[: 1 + n_rows] if n_rows is not None else rows
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return bunch


def test_iris_csv(tmp_path):
    path = tmp_path / "iris.csv"
    bunch = _write_iris_csv(path)
    data = load_iris(str(path))
    assert len(data) == 150 and data.class_counts() == [50, 50, 50]
    assert np.array_equal(data.labels, bunch.target)
    assert np.allclose(data.raw, bunch.data[:, [2, 3]])
    assert np.allclose(data.features, load_iris().features)


def test_iris_csv_must_be_complete(tmp_path):
    path = tmp_path / "iris.csv"
    _write_iris_csv(path, n_rows=120)
    with pytest.raises(ValueError, match="150"):
        load_iris(str(path))


@pytest.mark.parametrize(
    "line",
    ["5.1,3.5,1.4,0.2", "5.1,3.5,1.4,0.2,daisy", "5.1,3.5,x,0.2,setosa", "5.1,3.5,1.4,0.2,7"],
)
def test_iris_csv_errors(tmp_path, line):
    path = tmp_path / "iris.csv"
    path.write_text("5.1,3.5,1.4,0.2,setosa\n" + line + "\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_iris(str(path))


def test_circles_noiseless_radius():
    data = make_circles(50, noise_sd=0.0, factor=0.5, seed=0)
    assert len(data) == 100 and data.class_counts() == [50, 50]
    r = np.linalg.norm(data.raw, axis=1)
    assert np.allclose(r[data.labels == 1], 0.5, atol=1e-12)
    assert np.allclose(r[data.labels == 0], 1.0, atol=1e-12)


def test_circles_are_seeded_and_validated():
    a, b = make_circles(seed=4), make_circles(seed=4)
    assert np.array_equal(a.raw, b.raw) and np.array_equal(a.labels, b.labels)
    assert len(a) == 130
    with pytest.raises(ValueError):
        make_circles(factor=1.0)
    with pytest.raises(ValueError):
        make_circles(noise_sd=-0.1)


def test_moons_noiseless_shape():
    data = make_moons(100, noise_sd=0.0, seed=0)
    assert len(data) == 200
    top = data.raw[data.labels == 0]
    assert np.allclose(np.sum(top ** 2, axis=1), 1.0, atol=1e-12)
    bottom = data.raw[data.labels == 1]
    assert np.allclose((1 - bottom[:, 0]) ** 2 + (0.5 - bottom[:, 1]) ** 2, 1.0, atol=1e-12)


def test_moons_are_seeded():
    assert np.array_equal(make_moons(seed=2).features, make_moons(seed=2).features)
    assert not np.array_equal(make_moons(seed=2).features, make_moons(seed=3).features)


def test_split_iris():
    data = load_iris()
    train, test = split(data, SplitSpec(per_class_train=10, seed=0))
    assert len(train) == 30 and len(test) == 120
    assert train.class_counts() == [10, 10, 10]
    again, _ = split(data, SplitSpec(per_class_train=10, seed=0))
    assert np.array_equal(train.raw, again.raw)
    both = np.vstack([train.raw, test.raw])
    assert sorted(map(tuple, both)) == sorted(map(tuple, data.raw))


def test_split_bounds():
    data = load_iris()
    with pytest.raises(ValueError):
        split(data, SplitSpec(per_class_train=50, seed=0))
    with pytest.raises(ValueError):
        SplitSpec(per_class_train=0, seed=0)


def test_rescale_uses_given_scaling():
    pool = make_circles(65, seed=0)
    fresh = make_circles(50, seed=1)
    out = rescale(fresh, pool.scaling)
    assert np.array_equal(out.features, pool.scaling.apply(fresh.raw))
    assert out.scaling is pool.scaling


def test_scaling_is_minmax_to_angles():
    data = load_iris()
    ref = MinMaxScaler(feature_range=(0, np.pi)).fit(data.raw)
    assert np.allclose(data.features, ref.transform(data.raw))
    assert np.array_equal(data.scaling.mins, ref.data_min_)
    assert np.array_equal(data.scaling.maxs, ref.data_max_)
    assert data.scaling.to_dict() == {
        "min": [float(v) for v in ref.data_min_],
        "max": [float(v) for v in ref.data_max_],
    }


def test_scaling_constant_feature_and_out_of_range():
    pool = make_circles(20, seed=0)
    outside = pool.scaling.apply(pool.scaling.maxs + 1.0)
    # fuera del rango de ajuste no se recorta
    assert np.all(outside > np.pi)
    flat = from_raw("flat", [[1.0, 2.0], [3.0, 2.0]], [0, 1])
    assert np.allclose(flat.features[:, 1], 0.0)
    assert np.allclose(flat.features[:, 0], [0.0, np.pi])


@pytest.mark.parametrize("seed", [2**40 + 3, 2**63 - 1])
def test_generators_accept_wide_seeds(seed):
    assert len(make_circles(10, seed=seed)) == 20
    assert len(make_moons(10, seed=seed)) == 20
    assert np.array_equal(make_moons(10, seed=seed).raw, make_moons(10, seed=seed % 2**32).raw)
