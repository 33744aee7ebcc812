import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qknn_lab import data
from qknn_lab.data import Dataset, DataError, SplitSpec

ROW_M = "842302,M," + ",".join(str(float(i)) for i in range(1, 31))
ROW_B = "842517,B," + ",".join(str(float(i) / 2) for i in range(1, 31))


def write(tmp_path, lines, name="wdbc.csv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_load_well_formed(tmp_path):
    records, report = data.load_csv(write(tmp_path, [ROW_M, ROW_B, ROW_M]))
    assert len(records) == 3
    assert report.rows_dropped == 0
    assert not report.header_skipped
    assert records[0].features[:3] == (1.0, 2.0, 3.0)


def test_header_is_detected(tmp_path):
    header = "id,diagnosis," + ",".join(f"f{i}" for i in range(30))
    records, report = data.load_csv(write(tmp_path, [header, ROW_B]))
    assert report.header_skipped
    assert len(records) == 1


def test_missing_value_row_dropped(tmp_path):
    bad = ROW_M.replace(",5.0,", ",?,")
    records, report = data.load_csv(write(tmp_path, [ROW_M, bad]))
    assert len(records) == 1
    assert report.dropped["missing_value"] == 1


def test_bad_diagnosis_dropped(tmp_path):
    bad = ROW_M.replace(",M,", ",X,")
    _, report = data.load_csv(write(tmp_path, [ROW_B, bad]))
    assert report.dropped == {"bad_diagnosis": 1}


def test_field_count_and_unparsable(tmp_path):
    short = ",".join(ROW_M.split(",")[:10])
    junk = ROW_M.replace(",7.0,", ",seven,")
    _, report = data.load_csv(write(tmp_path, [ROW_B, short, junk]))
    assert report.dropped == {"field_count": 1, "unparsable": 1}


def test_no_valid_rows(tmp_path):
    with pytest.raises(DataError):
        data.load_csv(write(tmp_path, [ROW_M.replace(",M,", ",Q,")]))


def test_unreadable_file(tmp_path):
    with pytest.raises(OSError):
        data.load_csv(tmp_path / "missing.csv")


def test_select_mean_features(tmp_path):
    records, _ = data.load_csv(write(tmp_path, [ROW_M, ROW_B]))
    ds = data.select_mean_features(records)
    assert ds.X.shape == (2, 10)
    assert ds.y.tolist() == [1, 0]
    assert ds.feature_names[-1] == "fractal_dimension_mean"


def test_bundled_wdbc():
    ds, report = data.load_wdbc()
    assert len(ds) == 569
    assert report.rows_dropped == 0
    assert int(np.sum(ds.y == 0)) == 357
    assert int(np.sum(ds.y == 1)) == 212
    assert ds.X.shape[1] == 10
    assert ds.X[0, 0] == pytest.approx(17.99)


def toy(n, malignant):
    X = np.arange(n * 10, dtype=float).reshape(n, 10)
    y = np.array([1] * malignant + [0] * (n - malignant))
    return Dataset(X, y)


def test_split_sizes():
    train, test = data.split(toy(100, 40), SplitSpec(0.65, 7))
    assert (len(train), len(test)) == (65, 35)
    assert abs(int(train.y.sum()) - 0.65 * 40) <= 1


def test_split_deterministic_and_seed_dependent():
    ds = toy(100, 40)
    a = data.split_indices(ds.y, SplitSpec(0.65, 1))
    b = data.split_indices(ds.y, SplitSpec(0.65, 1))
    c = data.split_indices(ds.y, SplitSpec(0.65, 2))
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], c[0])
    assert len(a[0]) == len(c[0])


@settings(max_examples=50, deadline=None)
@given(n=st.integers(4, 300), frac=st.floats(0.05, 0.95), seed=st.integers(0, 2**63), pos=st.floats(0, 1))
def test_split_is_stratified_partition(n, frac, seed, pos):
    y = np.array([1] * int(pos * n) + [0] * (n - int(pos * n)))
    train, test = data.split_indices(y, SplitSpec(frac, seed))
    assert len(train) == int(np.floor(frac * n + 0.5))
    assert sorted(np.concatenate([train, test]).tolist()) == list(range(n))
    for c in (0, 1):
        assert abs(int(np.sum(y[train] == c)) - frac * int(np.sum(y == c))) < 1 + 1e-9


def test_split_config_validation():
    for frac in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            SplitSpec(frac, 0)


def test_min_max_examples():
    train = Dataset(np.array([[2.0, 7.0], [4.0, 7.0]]), np.array([0, 1]))
    test = Dataset(np.array([[3.0, 7.0], [10.0, 1.0], [0.0, 9.0]]), np.array([0, 1, 0]))
    tr, te = data.min_max_normalize(train, test)
    assert tr.X.tolist() == [[0.0, 0.0], [1.0, 0.0]]
    assert te.X.tolist() == [[0.5, 0.0], [1.0, 0.0], [0.0, 0.0]]


def test_binarize_examples():
    train = Dataset(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0], [4.0, 5.0], [5.0, 5.0]]), np.zeros(5))
    test = Dataset(np.array([[4.0, 5.0], [2.0, 6.0], [3.0, 5.0]]), np.zeros(3))
    tr, te = data.binarize(train, test)
    assert te.X.tolist() == [[1, 0], [0, 1], [0, 0]]
    assert tr.X[:, 1].tolist() == [0] * 5


def test_no_test_leakage():
    rng = np.random.default_rng(0)
    train = Dataset(rng.normal(size=(30, 10)), rng.integers(0, 2, 30))
    test = Dataset(rng.normal(size=(12, 10)), rng.integers(0, 2, 12))
    perturbed = Dataset(test.X * 100 + 50, test.y)
    tr1, _ = data.min_max_normalize(train, test)
    tr2, _ = data.min_max_normalize(train, perturbed)
    np.testing.assert_array_equal(tr1.X, tr2.X)
    b1, _ = data.binarize(tr1, test)
    b2, _ = data.binarize(tr2, perturbed)
    np.testing.assert_array_equal(b1.X, b2.X)
    np.testing.assert_array_equal(data.MinMaxScaler.fit(train.X).lo, data.MinMaxScaler.fit(train.X).lo)


def test_pipeline_is_deterministic():
    ds, _ = data.load_wdbc()
    outs = []
    for _ in range(2):
        tr, te = data.split(ds, SplitSpec(0.65, 42))
        tr, te = data.min_max_normalize(tr, te)
        outs.append(data.binarize(tr, te))
    for a, b in zip(outs[0], outs[1]):
        assert a.X.tobytes() == b.X.tobytes()
        assert a.y.tobytes() == b.y.tobytes()
