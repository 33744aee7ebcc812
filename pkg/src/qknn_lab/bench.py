"""Benchmark pipeline shared by the CLI and the scripts.

Every seed goes through: stratified split -> min-max scaling (train-fitted) ->
classical KNN on the scaled features, and median binarization (train-fitted)
-> quantum KNN on the bits. Both algorithms see the same split for a seed.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import data, knn, qknn
from .report import new_report, summarize


@dataclass(frozen=True)
class RunConfig:
    command: str
    data: str | None = None
    seed: int = 42
    split: float = 0.65
    k: int = 13
    k_range: tuple[int, int] | None = None
    threshold: int | None = None  # None means calibrate per test point
    k_for_auto: int | None = None
    t_range: tuple[int, int] | None = None
    shots: int | None = None
    backend: str = "sparse"
    flag_mode: str = "offset-carry"
    reps: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("--reps must be >= 1")
        if self.k < 1:
            raise ValueError("--k must be >= 1")
        if self.k_for_auto is not None and self.k_for_auto < 1:
            raise ValueError("--k-for-auto must be >= 1")
        if self.threshold is not None and self.threshold < 1:
            raise ValueError("--threshold must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise ValueError("--shots must be >= 1")
        for name, rng in (("--k-range", self.k_range), ("--t-range", self.t_range)):
            if rng is not None and not 1 <= rng[0] <= rng[1]:
                raise ValueError(f"{name} must satisfy 1 <= A <= B")
        data.SplitSpec(self.split, self.seed)

    @property
    def seeds(self) -> list[int]:
        return [self.seed + r for r in range(self.reps)]

    def echo(self) -> dict:
        cfg = asdict(self)
        cfg["data"] = Path(self.data).name if self.data else "bundled:wdbc.csv"
        return cfg


@dataclass
class PreparedSplit:
    seed: int
    split_hash: str
    train: data.Dataset
    test: data.Dataset
    train_bits: data.Dataset
    test_bits: data.Dataset


def prepare(dataset: data.Dataset, seed: int, fraction: float) -> PreparedSplit:
    spec = data.SplitSpec(fraction, seed)
    train_idx, test_idx = data.split_indices(dataset.y, spec)
    train, test = dataset.subset(train_idx), dataset.subset(test_idx)
    train, test = data.min_max_normalize(train, test)
    train_bits, test_bits = data.binarize(train, test)
    return PreparedSplit(seed, data.split_hash(train_idx), train, test, train_bits, test_bits)


def run_knn(split: PreparedSplit, k: int) -> dict:
    k = min(k, len(split.train))
    model = knn.KnnModel(split.train.X.tolist(), split.train.y.tolist(), k)
    predicted = model.predict_many(split.test.X.tolist())
    return {"accuracy": knn.accuracy(predicted, split.test.y.tolist()), "k": k}


def knn_sweep(split: PreparedSplit, k_range: tuple[int, int]) -> list[tuple[int, float]]:
    hi = min(k_range[1], len(split.train))
    return knn.k_sweep(split.train.X.tolist(), split.train.y.tolist(), split.test.X.tolist(),
                       split.test.y.tolist(), range(k_range[0], hi + 1))


def _training_set(split: PreparedSplit) -> qknn.TrainingSet:
    return qknn.TrainingSet.from_arrays(split.train_bits.X.astype(int), split.train_bits.y, n_classes=2)


def run_qknn(split: PreparedSplit, cfg: RunConfig, threshold: int | None = None) -> dict:
    ts = _training_set(split)
    threshold = cfg.threshold if threshold is None else threshold
    k_auto = min(cfg.k_for_auto or cfg.k, len(ts))
    rng = np.random.default_rng(split.seed) if cfg.shots is not None else None
    correct = 0
    acceptance, effective = [], Counter()
    fallbacks = 0
    for x, y in zip(split.test_bits.X.astype(int).tolist(), split.test_bits.y.tolist()):
        t = threshold if threshold is not None else qknn.calibrate_threshold(ts, x, k_auto, cfg.backend)
        qcfg = qknn.QknnConfig(t, shots=cfg.shots, backend=cfg.backend, flag_mode=cfg.flag_mode)
        result = qknn.classify(ts, x, qcfg, rng)
        correct += int(result.label == y)
        acceptance.append(result.acceptance)
        effective[result.effective_t] += 1
        fallbacks += int(result.effective_t != t)
    return {
        "accuracy": correct / len(split.test_bits),
        "threshold": threshold if threshold is not None else f"auto(k={k_auto})",
        "mean_acceptance": float(np.mean(acceptance)),
        "effective_t_histogram": {str(t): c for t, c in sorted(effective.items())},
        "fallbacks": fallbacks,
    }


def _mean_sweep(per_seed: list[list[tuple[int, float]]], label: str) -> list[dict]:
    merged: dict[int, list[float]] = {}
    for sweep in per_seed:
        for x, acc in sweep:
            merged.setdefault(x, []).append(acc)
    return [{label: x, "accuracy": float(np.mean(v))} for x, v in sorted(merged.items())]


def run_experiment(cfg: RunConfig) -> dict:
    """Run ``knn``, ``qknn`` or ``compare`` over ``cfg.seeds`` and build the report."""
    start = time.perf_counter()
    dataset, cleaning = data.load_wdbc(cfg.data)
    report = new_report(cfg.command, cfg.echo())
    report["cleaning"] = cleaning.as_dict()
    algos = {"knn": ["knn"], "qknn": ["qknn"], "compare": ["knn", "qknn"]}[cfg.command]
    runs, k_sweeps, t_sweeps = [], [], []
    for seed in cfg.seeds:
        split = prepare(dataset, seed, cfg.split)
        run = {"seed": seed, "split_hash": split.split_hash,
               "n_train": len(split.train), "n_test": len(split.test)}
        if "knn" in algos:
            run["knn"] = run_knn(split, cfg.k)
            if cfg.k_range is not None:
                sweep = knn_sweep(split, cfg.k_range)
                run["knn"]["k_sweep"] = [{"k": k, "accuracy": a} for k, a in sweep]
                run["knn"]["best_k"] = knn.best_k(sweep)
                k_sweeps.append(sweep)
        if "qknn" in algos:
            run["qknn"] = run_qknn(split, cfg)
            if cfg.t_range is not None:
                n = split.train_bits.X.shape[1]
                sweep = [(t, run_qknn(split, cfg, threshold=t)["accuracy"])
                         for t in range(cfg.t_range[0], min(cfg.t_range[1], n + 1) + 1)]
                run["qknn"]["t_sweep"] = [{"t": t, "accuracy": a} for t, a in sweep]
                t_sweeps.append(sweep)
        if len(algos) == 2:
            run["difference"] = run["qknn"]["accuracy"] - run["knn"]["accuracy"]
        runs.append(run)
    results = report["results"]
    results["runs"] = runs
    results["seeds"] = cfg.seeds
    for algo in algos:
        results[algo] = summarize(run[algo]["accuracy"] for run in runs)
    if len(algos) == 2:
        results["paired_difference"] = summarize(run["difference"] for run in runs)
    if "qknn" in algos:
        results["qknn"]["mean_acceptance"] = float(np.mean([run["qknn"]["mean_acceptance"] for run in runs]))
    if k_sweeps:
        results["k_sweep"] = _mean_sweep(k_sweeps, "k")
        results["best_k"] = knn.best_k([(p["k"], p["accuracy"]) for p in results["k_sweep"]])
    if t_sweeps:
        results["t_sweep"] = _mean_sweep(t_sweeps, "t")
    report["timing"] = {"total_seconds": time.perf_counter() - start}
    return report


def sweep_csv(report: dict) -> str:
    """Long-format plot data: seed, parameter, value, accuracy."""
    lines = ["seed,parameter,value,accuracy"]
    for run in report["results"]["runs"]:
        for algo, key, label in (("knn", "k_sweep", "k"), ("qknn", "t_sweep", "t")):
            for point in run.get(algo, {}).get(key, []):
                lines.append(f"{run['seed']},{label},{point[label]},{point['accuracy']!r}")
    return "\n".join(lines) + "\n"
