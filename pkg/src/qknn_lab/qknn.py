"""Hamming-distance quantum KNN classifier.

Register map (``QknnLayout``), low qubits first:

* ``diff`` (n qubits): starts as the training vector, ends as per-feature
  agreement bits (1 = the training and test feature match).
* ``cls``: the class label in binary.
* ``acc`` (w = l + 1 qubits, l = ceil(log2(n + 1))): reversible counter.
* ``flag``: set to 1 on branches whose Hamming distance to the test vector is
  below the threshold ``t``.

With the default ``offset-carry`` flag mode the counter is pre-loaded with
``A0 = 2**l - (n - t + 1)`` and incremented once per agreeing feature, so its
top bit ends up set exactly when ``agreements >= n - t + 1``, i.e. when
``distance < t``. The ``or-highbits`` mode instead counts disagreements from 0
and flags branches where no counter bit at or above ``log2(t)`` is set; it only
exists for power-of-two thresholds.

Classification post-selects on ``flag = 1`` and reads the class register.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .sim import (
    CNOT,
    Circuit,
    QuantumState,
    X,
    apply_circuit,
    controlled_x,
    marginal,
    sample_counts,
    _backend,
)

BitVector = tuple[int, ...]
FLAG_MODES = ("offset-carry", "or-highbits")
TIE_TOLERANCE = 1e-9


def bits_from_string(s: str) -> BitVector:
    """'00101' -> (0, 0, 1, 0, 1); character i is feature i."""
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"not a bit string: {s!r}")
    return tuple(int(c) for c in s)


@dataclass(frozen=True)
class LabeledBitVector:
    bits: BitVector
    label: int


@dataclass(frozen=True)
class TrainingSet:
    items: tuple[LabeledBitVector, ...]
    n_classes: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("training set is empty")
        n = len(self.items[0].bits)
        if n < 1:
            raise ValueError("feature vectors must have at least one bit")
        if self.n_classes < 1:
            raise ValueError("need at least one class")
        for item in self.items:
            if len(item.bits) != n:
                raise ValueError("training vectors have differing lengths")
            if any(b not in (0, 1) for b in item.bits):
                raise ValueError(f"non-binary feature in {item.bits}")
            if not 0 <= item.label < self.n_classes:
                raise ValueError(f"label {item.label} outside [0, {self.n_classes})")

    @classmethod
    def from_arrays(cls, bits, labels, n_classes: int | None = None) -> "TrainingSet":
        labels = [int(c) for c in labels]
        if n_classes is None:
            n_classes = max(labels) + 1 if labels else 1
        items = [LabeledBitVector(tuple(int(b) for b in row), c) for row, c in zip(bits, labels)]
        return cls(tuple(items), n_classes)

    @property
    def n(self) -> int:
        return len(self.items[0].bits)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class QknnLayout:
    diff: tuple[int, ...]
    cls: tuple[int, ...]
    acc: tuple[int, ...]
    flag: int

    def __post_init__(self):
        qubits = self.diff + self.cls + self.acc + (self.flag,)
        if len(set(qubits)) != len(qubits):
            raise ValueError("register index sets overlap")
        if len(self.acc) < 2:
            raise ValueError("accumulator needs at least two qubits")

    @classmethod
    def for_problem(cls, n: int, n_classes: int) -> "QknnLayout":
        c = math.ceil(math.log2(n_classes)) if n_classes > 1 else 0
        w = math.ceil(math.log2(n + 1)) + 1
        diff = tuple(range(n))
        cls_reg = tuple(range(n, n + c))
        acc = tuple(range(n + c, n + c + w))
        return cls(diff, cls_reg, acc, n + c + w)

    @property
    def n_features(self) -> int:
        return len(self.diff)

    @property
    def l(self) -> int:
        return len(self.acc) - 1

    @property
    def n_qubits(self) -> int:
        return len(self.diff) + len(self.cls) + len(self.acc) + 1


def _check_threshold(t: int, n: int) -> None:
    if not 1 <= t <= n + 1:
        raise ValueError(f"threshold t={t} outside [1, {n + 1}]")


def threshold_offset(n: int, t: int) -> int:
    """Counter preload ``2**l - (n - t + 1)``; lies in (0, 2**l]."""
    _check_threshold(t, n)
    l = math.ceil(math.log2(n + 1))
    return (1 << l) - (n - t + 1)


def encode_training_superposition(ts: TrainingSet, layout: QknnLayout, backend: str = "sparse") -> QuantumState:
    """Equal-weight superposition of ``|v^p, c^p>``; counter and flag at 0.

    Repeated (vector, label) pairs share one basis state with amplitude
    ``sqrt(m / N)``.
    """
    if len(layout.diff) != ts.n:
        raise ValueError(f"layout has {len(layout.diff)} feature qubits, data has {ts.n}")
    if ts.n_classes > (1 << len(layout.cls)):
        raise ValueError("class register too small for the label set")
    multiplicity = Counter()
    for item in ts.items:
        key = 0
        for q, b in zip(layout.diff, item.bits):
            key |= b << q
        for j, q in enumerate(layout.cls):
            key |= ((item.label >> j) & 1) << q
        multiplicity[key] += 1
    keys = np.fromiter(multiplicity.keys(), dtype=np.int64, count=len(multiplicity))
    amps = np.sqrt(np.fromiter(multiplicity.values(), dtype=float, count=len(multiplicity)) / len(ts))
    return _backend(backend).from_entries(layout.n_qubits, keys, amps)


def build_offset_loader(layout: QknnLayout, t: int) -> Circuit:
    a0 = threshold_offset(layout.n_features, t)
    return Circuit(layout.n_qubits, [X(q) for j, q in enumerate(layout.acc) if (a0 >> j) & 1])


def build_difference(test: Sequence[int], layout: QknnLayout) -> Circuit:
    """Turn the stored training bits into agreement bits against ``test``."""
    if len(test) != len(layout.diff):
        raise ValueError(f"test vector has {len(test)} bits, expected {len(layout.diff)}")
    if any(b not in (0, 1) for b in test):
        raise ValueError("test vector must be binary")
    circuit = Circuit(layout.n_qubits, [X(q) for q, b in zip(layout.diff, test) if b])
    return circuit.extend(X(q) for q in layout.diff)


def apply_difference(state: QuantumState, test: Sequence[int], layout: QknnLayout) -> QuantumState:
    return apply_circuit(state, build_difference(test, layout))


def build_incrementer(w: int, qubits: Sequence[int] | None = None, controls: Sequence[int] = (),
                      n: int | None = None) -> Circuit:
    """``|a> -> |a + 1 mod 2**w>`` on ``qubits`` (LSB first), optionally controlled.

    Highest bit first: bit j flips when every lower bit is 1, then the cascade
    ends with the unconditional flip of bit 0.
    """
    if w < 1:
        raise ValueError("incrementer width must be >= 1")
    qubits = tuple(range(w)) if qubits is None else tuple(qubits)
    if len(qubits) != w:
        raise ValueError(f"expected {w} register qubits, got {len(qubits)}")
    controls = tuple(controls)
    if n is None:
        n = max(qubits + controls) + 1
    circuit = Circuit(n)
    for j in range(w - 1, -1, -1):
        circuit.append(controlled_x(controls + qubits[:j], qubits[j]))
    return circuit


def build_accumulator(layout: QknnLayout, count_disagreements: bool = False) -> Circuit:
    """One controlled increment of the counter per feature qubit."""
    circuit = Circuit(layout.n_qubits)
    w = len(layout.acc)
    for q in layout.diff:
        if count_disagreements:
            circuit.append(X(q))
        circuit.extend(build_incrementer(w, layout.acc, controls=(q,), n=layout.n_qubits))
        if count_disagreements:
            circuit.append(X(q))
    return circuit


def apply_accumulator(state: QuantumState, layout: QknnLayout, t: int,
                      count_disagreements: bool = False) -> QuantumState:
    _check_threshold(t, layout.n_features)
    return apply_circuit(state, build_accumulator(layout, count_disagreements))


def build_or_gate(inputs: Sequence[int], target: int, n: int | None = None) -> Circuit:
    """``target ^= OR(inputs)`` via De Morgan: NOT(AND(NOT inputs))."""
    inputs = tuple(inputs)
    if not inputs:
        raise ValueError("OR needs at least one input")
    if target in inputs or len(set(inputs)) != len(inputs):
        raise ValueError("qubit index collision in OR gate")
    if n is None:
        n = max(inputs + (target,)) + 1
    negate = [X(q) for q in inputs]
    return Circuit(n, negate + [controlled_x(inputs, target), X(target)] + negate)


def or_gate(state: QuantumState, inputs: Sequence[int], target: int) -> QuantumState:
    return apply_circuit(state, build_or_gate(inputs, target, state.n))


def _highbits_exponent(t: int, layout: QknnLayout) -> int:
    m = t.bit_length() - 1
    if t < 1 or (1 << m) != t:
        raise ValueError(f"or-highbits mode needs a power-of-two threshold, got t={t}")
    if m > layout.l:
        raise ValueError(f"t={t} exceeds the counter range")
    return m


def build_flag(layout: QknnLayout, mode: str = "offset-carry", t: int | None = None) -> Circuit:
    if mode == "offset-carry":
        return Circuit(layout.n_qubits, [CNOT(layout.acc[layout.l], layout.flag)])
    if mode == "or-highbits":
        if t is None:
            raise ValueError("or-highbits mode needs the threshold")
        m = _highbits_exponent(t, layout)
        circuit = build_or_gate(layout.acc[m:], layout.flag, layout.n_qubits)
        return circuit.append(X(layout.flag))
    raise ValueError(f"unknown flag mode {mode!r}; expected one of {FLAG_MODES}")


def apply_flag(state: QuantumState, layout: QknnLayout, mode: str = "offset-carry",
               t: int | None = None) -> QuantumState:
    return apply_circuit(state, build_flag(layout, mode, t))


def build_qknn_circuit(test: Sequence[int], layout: QknnLayout, t: int, mode: str = "offset-carry") -> Circuit:
    """Everything after state preparation: offset, difference, counter, flag."""
    if mode == "offset-carry":
        _check_threshold(t, layout.n_features)
        return (build_offset_loader(layout, t) + build_difference(test, layout)
                + build_accumulator(layout) + build_flag(layout, mode))
    _highbits_exponent(t, layout)
    return (build_difference(test, layout) + build_accumulator(layout, count_disagreements=True)
            + build_flag(layout, mode, t))


@dataclass(frozen=True)
class QknnConfig:
    threshold: int
    shots: int | None = None  # None means exact probabilities
    backend: str = "sparse"
    fallback: bool = True
    flag_mode: str = "offset-carry"

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.flag_mode not in FLAG_MODES:
            raise ValueError(f"unknown flag mode {self.flag_mode!r}")
        _backend(self.backend)


class NoNeighborError(RuntimeError):
    """No training branch fell within the threshold and fallback is off."""


@dataclass(frozen=True)
class ClassificationResult:
    label: int
    class_distribution: dict[int, float]
    acceptance: float
    effective_t: int
    accepted_shots: int | None = None
    shots: int | None = None


def _argmax_lowest(dist: dict[int, float]) -> int:
    best = max(dist.values())
    return min(c for c, p in dist.items() if p >= best - TIE_TOLERANCE)


def _post_select(ts: TrainingSet, layout: QknnLayout, state: QuantumState, cfg: QknnConfig,
                 rng: np.random.Generator | None):
    qubits = list(layout.cls) + [layout.flag]
    flag_bit = 1 << len(layout.cls)
    if cfg.shots is None:
        joint = marginal(state, qubits)
        accepted = None
    else:
        if rng is None:
            raise ValueError("shots mode needs a random generator")
        joint = sample_counts(state, qubits, cfg.shots, rng)
        accepted = sum(c for o, c in joint.items() if o & flag_bit)
    weights = {c: 0.0 for c in range(ts.n_classes)}
    for outcome, w in joint.items():
        if outcome & flag_bit:
            weights[outcome & (flag_bit - 1)] += w
    total = sum(weights.values())
    if cfg.shots is not None:
        acceptance = total / cfg.shots
    else:
        acceptance = min(total, 1.0)
    return weights, total, acceptance, accepted


def classify(ts: TrainingSet, test: Sequence[int], cfg: QknnConfig,
             rng: np.random.Generator | None = None) -> ClassificationResult:
    """Post-selected QKNN prediction for one binary test vector."""
    layout = QknnLayout.for_problem(ts.n, ts.n_classes)
    if len(test) != ts.n:
        raise ValueError(f"test vector has {len(test)} bits, expected {ts.n}")
    encoded = encode_training_superposition(ts, layout, cfg.backend)
    t = cfg.threshold
    if cfg.flag_mode == "offset-carry":
        _check_threshold(t, ts.n)
    else:
        _highbits_exponent(t, layout)
    while True:
        state = apply_circuit(encoded, build_qknn_circuit(test, layout, t, cfg.flag_mode))
        weights, total, acceptance, accepted = _post_select(ts, layout, state, cfg, rng)
        if total > 0:
            break
        if not cfg.fallback:
            raise NoNeighborError(f"no training vector within Hamming distance < {t}")
        t = t + 1 if cfg.flag_mode == "offset-carry" else 2 * t
    dist = {c: w / total for c, w in weights.items()}
    return ClassificationResult(_argmax_lowest(dist), dist, acceptance, t, accepted, cfg.shots)


def acceptance_curve(ts: TrainingSet, test: Sequence[int], backend: str = "sparse") -> list[float]:
    """Exact acceptance probability for every threshold t = 1..n+1.

    Runs the difference and counter circuits once without an offset; the
    counter then holds the agreement count, whose distribution gives the
    acceptance for any t.
    """
    layout = QknnLayout.for_problem(ts.n, ts.n_classes)
    state = encode_training_superposition(ts, layout, backend)
    state = apply_circuit(state, build_difference(test, layout) + build_accumulator(layout))
    agreements = marginal(state, layout.acc)
    n = ts.n
    # d < t  <=>  agreements >= n - t + 1
    return [sum(p for s, p in agreements.items() if s >= n - t + 1) for t in range(1, n + 2)]


def calibrate_threshold(ts: TrainingSet, test: Sequence[int], k: int, backend: str = "sparse") -> int:
    """Smallest t whose acceptance probability reaches k/N."""
    if not 1 <= k <= len(ts):
        raise ValueError(f"k must lie in [1, {len(ts)}], got {k}")
    target = k / len(ts)
    for t, p in enumerate(acceptance_curve(ts, test, backend), start=1):
        if p >= target - 1e-12:
            return t
    return ts.n + 1
