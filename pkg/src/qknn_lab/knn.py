"""Classical K-nearest neighbors baseline (brute force, lazy)."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return math.dist(a, b)


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


METRICS: dict[str, Callable] = {"euclidean": euclidean_distance, "hamming": hamming_distance}


@dataclass
class KnnModel:
    """Stores the training data; all work happens in ``predict``.

    ``distance_calls`` counts metric evaluations so callers can check that a
    prediction costs exactly one distance per training point.
    """

    features: list
    labels: list[int]
    k: int
    metric: str = "euclidean"
    distance_calls: int = field(default=0, init=False)

    def __post_init__(self):
        self.features = [tuple(float(v) for v in row) if self.metric == "euclidean" else tuple(int(v) for v in row)
                         for row in self.features]
        self.labels = [int(c) for c in self.labels]
        if not self.features:
            raise ValueError("training set is empty")
        if len(self.features) != len(self.labels):
            raise ValueError("features and labels differ in length")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if not 1 <= self.k <= len(self.features):
            raise ValueError(f"k must lie in [1, {len(self.features)}], got {self.k}")

    def neighbors(self, x: Sequence[float]) -> list[int]:
        """Indices of the k nearest training points, ties broken by index."""
        dist = METRICS[self.metric]
        x = tuple(x)
        scored = []
        for i, row in enumerate(self.features):
            scored.append((dist(row, x), i))
        self.distance_calls += len(scored)
        scored.sort()
        return [i for _, i in scored[: self.k]]

    def predict(self, x: Sequence[float]) -> int:
        votes = Counter(self.labels[i] for i in self.neighbors(x))
        top = max(votes.values())
        return min(c for c, v in votes.items() if v == top)

    def predict_many(self, xs: Iterable[Sequence[float]]) -> list[int]:
        return [self.predict(x) for x in xs]


def predict(model: KnnModel, x: Sequence[float]) -> int:
    return model.predict(x)


def accuracy(predicted: Sequence[int], actual: Sequence[int]) -> float:
    if len(predicted) != len(actual) or not actual:
        raise ValueError("need equal-length, non-empty label sequences")
    return sum(int(p == a) for p, a in zip(predicted, actual)) / len(actual)


def suggest_k(n_train: int, n_classes: int = 2) -> int:
    """Square-root heuristic, nudged to an odd value for two-class problems."""
    if n_train < 1:
        raise ValueError("need at least one training point")
    k = max(1, math.floor(math.sqrt(n_train) + 0.5))
    if n_classes == 2 and k % 2 == 0:
        k += 1
    return min(k, n_train)


def k_sweep(train_x, train_y, valid_x, valid_y, k_range: Iterable[int],
            metric: str = "euclidean") -> list[tuple[int, float]]:
    """Validation accuracy for each k; neighbors are ranked once per point."""
    valid_x = [tuple(v) for v in valid_x]
    valid_y = [int(c) for c in valid_y]
    if not valid_x:
        raise ValueError("validation set is empty")
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("empty k range")
    model = KnnModel(list(train_x), list(train_y), k=max(ks), metric=metric)
    rankings = [model.neighbors(x) for x in valid_x]
    results = []
    for k in ks:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        correct = 0
        for ranked, y in zip(rankings, valid_y):
            votes = Counter(model.labels[i] for i in ranked[:k])
            top = max(votes.values())
            correct += int(min(c for c, v in votes.items() if v == top) == y)
        results.append((k, correct / len(valid_y)))
    return results


def best_k(sweep: Sequence[tuple[int, float]]) -> int:
    """Highest accuracy; the smallest k wins ties."""
    top = max(a for _, a in sweep)
    return min(k for k, a in sweep if a == top)
