import json

import numpy as np
import pytest

from qknn_lab import cli
from qknn_lab.report import SCHEMA_VERSION, without_timing


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def toy_csv(tmp_path):
    """20 rows: 6 malignant around 10, 14 benign around 1, well separated."""
    rng = np.random.default_rng(0)
    lines = ["id,diagnosis," + ",".join(f"f{i}" for i in range(30))]
    for i in range(20):
        malignant = i < 6
        centre = 10.0 if malignant else 1.0
        values = centre + 0.1 * rng.random(30)
        lines.append(f"{i},{'M' if malignant else 'B'}," + ",".join(f"{v:.6f}" for v in values))
    path = tmp_path / "toy.csv"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.mark.parametrize("x,y,p0", [("0", "0", 1.0), ("0", "1", 0.5), ("+", "0", 0.75), ("0.6,0.8", "0.6,0.8", 1.0)])
def test_swap_test_command(capsys, x, y, p0):
    report = run_json(capsys, "swap-test", "--x", x, "--y", y)
    assert report["schema_version"] == SCHEMA_VERSION
    assert report["results"]["p0"] == pytest.approx(p0, abs=1e-12)


def test_swap_test_shots(capsys):
    report = run_json(capsys, "swap-test", "--x", "1", "--y", "1", "--shots", "500")
    assert report["results"]["p0_sampled"] == 1.0


def test_swap_test_bad_state(capsys):
    code, _, err = run(capsys, "swap-test", "--x", "0,0,1", "--y", "0")
    assert code == 2
    assert err.count("\n") == 1 and err.startswith("qknn-lab: error[usage]")


def test_grover_command(capsys):
    report = run_json(capsys, "grover", "--n", "2", "--marked", "11")
    assert report["results"]["marked_probability"] == pytest.approx(1.0, abs=1e-12)
    report = run_json(capsys, "grover", "--n", "2", "--marked", "01", "--iterations", "0")
    assert report["results"]["distribution"] == pytest.approx({"00": 0.25, "01": 0.25, "10": 0.25, "11": 0.25})
    report = run_json(capsys, "grover", "--n", "3", "--marked", "101", "--iterations", "2")
    assert report["results"]["marked_probability"] == pytest.approx(0.9453, abs=1e-3)


def test_knn_toy_perfect(capsys, toy_csv):
    report = run_json(capsys, "knn", "--data", toy_csv, "--k", "3")
    assert report["results"]["knn"]["mean"] == 1.0
    assert report["cleaning"]["header_skipped"] is True


def test_knn_k_equal_n_is_majority(capsys, toy_csv):
    report = run_json(capsys, "knn", "--data", toy_csv, "--k", "13")
    run_ = report["results"]["runs"][0]
    assert (run_["n_train"], run_["n_test"]) == (13, 7)
    assert report["results"]["knn"]["mean"] == pytest.approx(5 / 7)


def test_qknn_toy_perfect(capsys, toy_csv):
    report = run_json(capsys, "qknn", "--data", toy_csv, "--k", "3")
    assert report["results"]["qknn"]["mean"] == 1.0


def test_qknn_full_threshold_is_majority(capsys, toy_csv):
    report = run_json(capsys, "qknn", "--data", toy_csv, "--threshold", "11")
    assert report["results"]["qknn"]["mean"] == pytest.approx(5 / 7)
    assert report["results"]["qknn"]["mean_acceptance"] == pytest.approx(1.0)


def test_compare_shares_splits(capsys, toy_csv):
    both = run_json(capsys, "compare", "--data", toy_csv, "--reps", "3", "--k", "3")
    knn_only = run_json(capsys, "knn", "--data", toy_csv, "--reps", "3", "--k", "3")
    qknn_only = run_json(capsys, "qknn", "--data", toy_csv, "--reps", "3", "--k", "3")
    hashes = [r["split_hash"] for r in both["results"]["runs"]]
    assert hashes == [r["split_hash"] for r in knn_only["results"]["runs"]]
    assert hashes == [r["split_hash"] for r in qknn_only["results"]["runs"]]
    for r in both["results"]["runs"]:
        assert 0 <= r["knn"]["accuracy"] <= 1 and 0 <= r["qknn"]["accuracy"] <= 1
        assert r["difference"] == r["qknn"]["accuracy"] - r["knn"]["accuracy"]


def test_compare_is_deterministic(tmp_path, toy_csv):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["compare", "--data", toy_csv, "--reps", "2", "--format", "json", "--out", str(p)]) == 0
    a, b = (json.loads(p.read_text()) for p in paths)
    assert without_timing(a) == without_timing(b)


def test_csv_output(capsys, toy_csv):
    code, out, _ = run(capsys, "compare", "--data", toy_csv, "--reps", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("seed,algorithm,accuracy")
    assert len(lines) == 1 + 2 * 2


def test_text_output(capsys, toy_csv):
    code, out, _ = run(capsys, "compare", "--data", toy_csv, "--reps", "2")
    assert code == 0
    assert "KNN" in out and "QKNN" in out and "mean" in out


def test_sweep_csv(tmp_path, capsys, toy_csv):
    sweep = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "compare", "--data", toy_csv, "--reps", "1", "--k-range", "1..5",
                     "--t-range", "1..3", "--sweep-csv", str(sweep))
    assert code == 0
    rows = sweep.read_text().strip().splitlines()
    assert rows[0] == "seed,parameter,value,accuracy"
    assert len(rows) == 1 + 5 + 3


def test_shots_mode_runs(capsys, toy_csv):
    report = run_json(capsys, "qknn", "--data", toy_csv, "--shots", "256", "--threshold", "2")
    assert report["results"]["qknn"]["mean"] == 1.0


def test_env_seed_fallback(monkeypatch, capsys, toy_csv):
    monkeypatch.setenv("QKNN_LAB_SEED", "7")
    report = run_json(capsys, "knn", "--data", toy_csv)
    assert report["results"]["seeds"] == [7]
    monkeypatch.setenv("QKNN_LAB_SEED", "seven")
    code, _, err = run(capsys, "knn", "--data", toy_csv)
    assert code == 2


@pytest.mark.parametrize(
    "argv,code,kind",
    [
        (["knn", "--k", "0"], 2, "usage"),
        (["qknn", "--threshold", "x"], 2, "usage"),
        (["compare", "--split", "1.5"], 2, "usage"),
        (["nonsense"], 2, "usage"),
        (["knn", "--k-range", "5..2"], 2, "usage"),
        (["grover", "--n", "2", "--marked", "7"], 2, "usage"),
        (["knn", "--data", "/definitely/not/here.csv"], 3, "data"),
    ],
)
def test_errors_are_single_line(capsys, argv, code, kind):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert out == ""
    assert err.count("\n") == 1
    assert err.startswith(f"qknn-lab: error[{kind}]: ")


def test_data_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,Q," + ",".join(["1.0"] * 30) + "\n")
    code, _, err = run(capsys, "knn", "--data", str(bad))
    assert code == 3 and "no valid rows" in err
