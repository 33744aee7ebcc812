"""Wisconsin Diagnostic Breast Cancer ingestion, splitting, scaling and binarization.

Expected CSV layout (UCI ``wdbc.data`` order): ``id, diagnosis, f1..f30`` with
diagnosis ``M`` or ``B``. A header row is detected and skipped automatically.
Only the ten ``*_mean`` columns (f1..f10) are kept.
"""

from __future__ import annotations

import csv
import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

N_RAW_FEATURES = 30
MEAN_FEATURES = (
    "radius_mean",
    "texture_mean",
    "perimeter_mean",
    "area_mean",
    "smoothness_mean",
    "compactness_mean",
    "concavity_mean",
    "concave_points_mean",
    "symmetry_mean",
    "fractal_dimension_mean",
)
LABELS = {"M": 1, "B": 0}


class DataError(ValueError):
    """Input data is unusable (no valid rows, wrong shape...)."""


def bundled_wdbc_path() -> Path:
    return Path(str(resources.files("qknn_lab") / "data" / "wdbc.csv"))


@dataclass(frozen=True)
class RawRecord:
    id: str
    diagnosis: str
    features: tuple[float, ...]


@dataclass
class CleaningReport:
    rows_read: int = 0
    rows_kept: int = 0
    header_skipped: bool = False
    dropped: Counter = field(default_factory=Counter)

    @property
    def rows_dropped(self) -> int:
        return sum(self.dropped.values())

    def as_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_dropped": self.rows_dropped,
            "header_skipped": self.header_skipped,
            "drop_reasons": dict(sorted(self.dropped.items())),
        }


def _parse_float(s: str) -> float | None:
    try:
        v = float(s)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(path) -> tuple[list[RawRecord], CleaningReport]:
    """Parse a WDBC-layout CSV, dropping (and counting) malformed rows."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    report = CleaningReport()
    records = []
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if rows and len(rows[0]) > 2 and _parse_float(rows[0][2]) is None:
        report.header_skipped = True
        rows = rows[1:]
    for row in rows:
        report.rows_read += 1
        row = [c.strip() for c in row]
        if len(row) != 2 + N_RAW_FEATURES:
            report.dropped["field_count"] += 1
            continue
        if any(c in ("", "?", "NA", "NaN", "nan") for c in row):
            report.dropped["missing_value"] += 1
            continue
        diagnosis = row[1].upper()
        if diagnosis not in LABELS:
            report.dropped["bad_diagnosis"] += 1
            continue
        values = [_parse_float(c) for c in row[2:]]
        if any(v is None for v in values):
            report.dropped["unparsable"] += 1
            continue
        records.append(RawRecord(row[0], diagnosis, tuple(values)))
    report.rows_kept = len(records)
    if not records:
        raise DataError(f"{path}: no valid rows")
    return records, report


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...] = MEAN_FEATURES
    ids: tuple[str, ...] = ()

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise DataError("X must be 2-D with one row per label")

    def __len__(self) -> int:
        return len(self.y)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        ids = tuple(self.ids[i] for i in idx) if self.ids else ()
        return Dataset(self.X[idx], self.y[idx], self.feature_names, ids)

    def with_features(self, X) -> "Dataset":
        return Dataset(X, self.y.copy(), self.feature_names, self.ids)


def select_mean_features(records) -> Dataset:
    if not records:
        raise DataError("no records")
    X = np.array([r.features[: len(MEAN_FEATURES)] for r in records], dtype=float)
    y = np.array([LABELS[r.diagnosis] for r in records], dtype=int)
    return Dataset(X, y, MEAN_FEATURES, tuple(r.id for r in records))


def load_wdbc(path=None) -> tuple[Dataset, CleaningReport]:
    records, report = load_csv(path or bundled_wdbc_path())
    return select_mean_features(records), report


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.65
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train fraction must lie in (0, 1), got {self.train_fraction}")


def split_indices(y, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Stratified shuffled split; every class gets floor or ceil of its share."""
    y = np.asarray(y)
    n_train = math.floor(spec.train_fraction * len(y) + 0.5)
    classes = sorted(set(y.tolist()))
    sizes = {c: int(np.sum(y == c)) for c in classes}
    ideal = {c: spec.train_fraction * sizes[c] for c in classes}
    alloc = {c: math.floor(ideal[c]) for c in classes}
    by_remainder = sorted(classes, key=lambda c: (-(ideal[c] - alloc[c]), c))
    for c in by_remainder[: n_train - sum(alloc.values())]:
        alloc[c] += 1
    rng = np.random.default_rng(spec.seed)
    train, test = [], []
    for c in classes:
        members = rng.permutation(np.flatnonzero(y == c))
        train.append(members[: alloc[c]])
        test.append(members[alloc[c]:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    train_idx, test_idx = split_indices(dataset.y, spec)
    return dataset.subset(train_idx), dataset.subset(test_idx)


def split_hash(train_idx) -> str:
    data = np.asarray(train_idx, dtype=np.int64).tobytes()
    return hashlib.sha256(data).hexdigest()[:16]


@dataclass(frozen=True)
class MinMaxScaler:
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, X) -> "MinMaxScaler":
        X = np.asarray(X, dtype=float)
        if len(X) == 0:
            raise DataError("cannot fit a scaler on an empty set")
        return cls(X.min(axis=0), X.max(axis=0))

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        span = self.hi - self.lo
        safe = np.where(span > 0, span, 1.0)
        out = np.where(span > 0, (X - self.lo) / safe, 0.0)
        return np.clip(out, 0.0, 1.0)


def min_max_normalize(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset]:
    """Scale each feature to [0, 1] using train-only minima and maxima."""
    scaler = MinMaxScaler.fit(train.X)
    return train.with_features(scaler.transform(train.X)), test.with_features(scaler.transform(test.X))


def median_thresholds(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if len(X) == 0:
        raise DataError("cannot fit thresholds on an empty set")
    return np.median(X, axis=0)


def binarize(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset]:
    """Bit i = 1 iff feature i is strictly above its train median."""
    thresholds = median_thresholds(train.X)
    return (train.with_features((train.X > thresholds).astype(float)),
            test.with_features((test.X > thresholds).astype(float)))
