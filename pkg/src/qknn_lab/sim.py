"""Pure-state simulation over the gate set H, X, CNOT, CCX, MCX, SWAP, CSWAP, ID.

Bit ordering: qubit 0 is the least significant bit of a basis index, so the
basis index 5 on three qubits means q0=1, q1=0, q2=1.

Two backends represent the same mathematical state:

* ``SparseState`` keeps only the nonzero amplitudes as a pair of numpy arrays
  (basis indices, complex amplitudes). Permutation gates rewrite indices with
  bit operations; H doubles the support and merges colliding indices.
* ``DenseState`` keeps all ``2**n`` amplitudes and applies gates by viewing the
  vector as an ``n``-axis tensor. It is mainly an oracle for the sparse path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

PRUNE_THRESHOLD = 1e-15
NORM_TOLERANCE = 1e-9
MAX_SPARSE_QUBITS = 63
MAX_DENSE_QUBITS = 30
MAX_UNITARY_QUBITS = 10

_SQRT1_2 = 1.0 / math.sqrt(2.0)

GATE_KINDS = ("H", "X", "CNOT", "CCX", "MCX", "SWAP", "CSWAP", "ID")
_N_TARGETS = {"H": 1, "X": 1, "CNOT": 1, "CCX": 1, "MCX": 1, "SWAP": 2, "CSWAP": 2, "ID": 1}
_N_CONTROLS = {"H": 0, "X": 0, "CNOT": 1, "CCX": 2, "SWAP": 0, "CSWAP": 1, "ID": 0}
PERMUTATION_KINDS = frozenset({"X", "CNOT", "CCX", "MCX", "SWAP", "CSWAP"})


class ResourceLimitError(RuntimeError):
    """Raised when a request would need an unreasonable amount of memory."""


# --------------------------------------------------------------------------
# Gates and circuits
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if len(self.targets) != _N_TARGETS[self.kind]:
            raise ValueError(f"{self.kind} takes {_N_TARGETS[self.kind]} target(s), got {self.targets}")
        if self.kind != "MCX" and len(self.controls) != _N_CONTROLS[self.kind]:
            raise ValueError(f"{self.kind} takes {_N_CONTROLS[self.kind]} control(s), got {self.controls}")
        qubits = self.qubits
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {self}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"qubit index collision in {self.kind} on {qubits}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def check(self, n: int) -> None:
        bad = [q for q in self.qubits if q >= n]
        if bad:
            raise ValueError(f"{self.kind} touches qubit(s) {bad} but the register has {n} qubits")

    def __str__(self):
        if self.controls:
            return f"{self.kind}({list(self.controls)} -> {list(self.targets)})"
        return f"{self.kind}({', '.join(map(str, self.targets))})"


def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def ID(q: int) -> Gate:
    return Gate("ID", (q,))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (target,), (control,))


def CCX(c1: int, c2: int, target: int) -> Gate:
    return Gate("CCX", (target,), (c1, c2))


def MCX(controls: Sequence[int], target: int) -> Gate:
    return Gate("MCX", (target,), tuple(controls))


def SWAP(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


def CSWAP(control: int, a: int, b: int) -> Gate:
    return Gate("CSWAP", (a, b), (control,))


def controlled_x(controls: Sequence[int], target: int) -> Gate:
    """X with any number of controls, using the narrowest named gate."""
    controls = tuple(controls)
    if not controls:
        return X(target)
    if len(controls) == 1:
        return CNOT(controls[0], target)
    if len(controls) == 2:
        return CCX(controls[0], controls[1], target)
    return MCX(controls, target)


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a circuit needs at least one qubit")
        self.gates = list(self.gates)
        for g in self.gates:
            g.check(self.n)

    def append(self, gate: Gate) -> "Circuit":
        gate.check(self.n)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def inverse(self) -> "Circuit":
        # every gate in the set is self-inverse
        return Circuit(self.n, self.gates[::-1])

    def kinds(self) -> list[str]:
        return [g.kind for g in self.gates]

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.n, other.n), self.gates + other.gates)


# --------------------------------------------------------------------------
# States
# --------------------------------------------------------------------------


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def _merge(keys: np.ndarray, amps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum amplitudes that share a basis index and drop near-zero entries."""
    uniq, inverse = np.unique(keys, return_inverse=True)
    if len(uniq) != len(keys):
        re = np.bincount(inverse, weights=amps.real, minlength=len(uniq))
        im = np.bincount(inverse, weights=amps.imag, minlength=len(uniq))
        amps = re + 1j * im
    else:
        amps = amps[np.argsort(keys, kind="stable")]
    keep = np.abs(amps) >= PRUNE_THRESHOLD
    return uniq[keep], amps[keep]


class SparseState:
    """Map from basis index to amplitude, stored as two parallel arrays."""

    backend = "sparse"

    def __init__(self, n: int, keys: np.ndarray, amps: np.ndarray):
        if not 1 <= n <= MAX_SPARSE_QUBITS:
            raise ValueError(f"sparse backend supports 1..{MAX_SPARSE_QUBITS} qubits, got {n}")
        self.n = n
        self.keys = np.asarray(keys, dtype=np.int64)
        self.amps = np.asarray(amps, dtype=np.complex128)

    @classmethod
    def from_entries(cls, n: int, keys, amps) -> "SparseState":
        keys, amps = _merge(np.asarray(keys, dtype=np.int64), np.asarray(amps, dtype=np.complex128))
        return cls(n, keys, amps)

    def entries(self) -> tuple[np.ndarray, np.ndarray]:
        return self.keys, self.amps

    @property
    def support_size(self) -> int:
        return len(self.keys)

    def apply(self, gate: Gate) -> "SparseState":
        gate.check(self.n)
        keys = self.keys
        if gate.kind == "ID":
            return SparseState(self.n, keys.copy(), self.amps.copy())
        if gate.kind == "H":
            bit = np.int64(1 << gate.targets[0])
            sign = np.where(keys & bit, -1.0, 1.0)
            new_keys = np.concatenate([keys & ~bit, keys | bit])
            new_amps = np.concatenate([self.amps, self.amps * sign]) * _SQRT1_2
            return SparseState(self.n, *_merge(new_keys, new_amps))
        cmask = np.int64(_mask(gate.controls))
        active = (keys & cmask) == cmask
        if gate.kind in ("SWAP", "CSWAP"):
            a, b = gate.targets
            differ = ((keys >> a) ^ (keys >> b)) & 1
            flip = np.where(active & (differ == 1), np.int64((1 << a) | (1 << b)), np.int64(0))
        else:
            flip = np.where(active, np.int64(1 << gate.targets[0]), np.int64(0))
        return SparseState(self.n, keys ^ flip, self.amps.copy())

    def to_dict(self) -> dict[int, complex]:
        return {int(k): complex(a) for k, a in zip(self.keys, self.amps)}

    def to_vector(self) -> np.ndarray:
        if self.n > MAX_DENSE_QUBITS:
            raise ResourceLimitError(f"cannot expand {self.n} qubits to a dense vector")
        vec = np.zeros(1 << self.n, dtype=np.complex128)
        vec[self.keys] = self.amps
        return vec

    def __repr__(self):
        return f"SparseState(n={self.n}, support={self.support_size})"


def _slicer(n: int, extra: int, fixed: Mapping[int, int]) -> tuple:
    idx = [slice(None)] * (n + extra)
    for q, b in fixed.items():
        idx[n - 1 - q] = slice(b, b + 1)
    return tuple(idx)


def _dense_apply(vec: np.ndarray, n: int, gate: Gate) -> np.ndarray:
    """Apply ``gate`` along axis 0 of ``vec`` (shape ``(2**n, *batch)``)."""
    batch = vec.shape[1:]
    t = vec.reshape((2,) * n + batch).copy()
    extra = len(batch)
    ctrl = {c: 1 for c in gate.controls}
    if gate.kind == "ID":
        pass
    elif gate.kind == "H":
        q = gate.targets[0]
        s0, s1 = _slicer(n, extra, {q: 0}), _slicer(n, extra, {q: 1})
        a0, a1 = t[s0].copy(), t[s1].copy()
        t[s0] = (a0 + a1) * _SQRT1_2
        t[s1] = (a0 - a1) * _SQRT1_2
    else:
        if gate.kind in ("SWAP", "CSWAP"):
            a, b = gate.targets
            s0 = _slicer(n, extra, {**ctrl, a: 0, b: 1})
            s1 = _slicer(n, extra, {**ctrl, a: 1, b: 0})
        else:
            q = gate.targets[0]
            s0 = _slicer(n, extra, {**ctrl, q: 0})
            s1 = _slicer(n, extra, {**ctrl, q: 1})
        tmp = t[s0].copy()
        t[s0] = t[s1]
        t[s1] = tmp
    return t.reshape(vec.shape)


class DenseState:
    """Full ``2**n`` amplitude vector."""

    backend = "dense"

    def __init__(self, n: int, vector: np.ndarray):
        if not 1 <= n <= MAX_DENSE_QUBITS:
            raise ValueError(f"dense backend supports 1..{MAX_DENSE_QUBITS} qubits, got {n}")
        vector = np.asarray(vector, dtype=np.complex128)
        if vector.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} amplitudes, got shape {vector.shape}")
        self.n = n
        self.vector = vector

    @classmethod
    def from_entries(cls, n: int, keys, amps) -> "DenseState":
        if n > MAX_DENSE_QUBITS:
            raise ValueError(f"dense backend supports 1..{MAX_DENSE_QUBITS} qubits, got {n}")
        vec = np.zeros(1 << n, dtype=np.complex128)
        np.add.at(vec, np.asarray(keys, dtype=np.int64), np.asarray(amps, dtype=np.complex128))
        return cls(n, vec)

    def entries(self) -> tuple[np.ndarray, np.ndarray]:
        keys = np.flatnonzero(self.vector)
        return keys.astype(np.int64), self.vector[keys]

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(np.abs(self.vector) >= PRUNE_THRESHOLD))

    def apply(self, gate: Gate) -> "DenseState":
        gate.check(self.n)
        return DenseState(self.n, _dense_apply(self.vector, self.n, gate))

    def to_dict(self) -> dict[int, complex]:
        keys, amps = self.entries()
        return {int(k): complex(a) for k, a in zip(keys, amps)}

    def to_vector(self) -> np.ndarray:
        return self.vector.copy()

    def __repr__(self):
        return f"DenseState(n={self.n})"


QuantumState = SparseState | DenseState
_BACKENDS = {"sparse": SparseState, "dense": DenseState}


def _backend(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; expected 'sparse' or 'dense'") from None


def new_basis_state(n: int, b: int, backend: str = "sparse") -> QuantumState:
    """Prepare ``|b>`` on ``n`` qubits."""
    if n < 1:
        raise ValueError("need at least one qubit")
    if not 0 <= b < (1 << n):
        raise ValueError(f"basis index {b} out of range for {n} qubits")
    return _backend(backend).from_entries(n, [b], [1.0])


def from_amplitudes(n: int, amplitudes, backend: str = "sparse", normalize: bool = False) -> QuantumState:
    """Build a state from a mapping ``index -> amplitude`` or a length ``2**n`` sequence."""
    if isinstance(amplitudes, Mapping):
        keys = np.fromiter((int(k) for k in amplitudes.keys()), dtype=np.int64, count=len(amplitudes))
        amps = np.array(list(amplitudes.values()), dtype=np.complex128)
    else:
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} amplitudes, got {amps.shape}")
        keys = np.arange(1 << n, dtype=np.int64)
    if len(keys) and (keys.min() < 0 or keys.max() >= (1 << n)):
        raise ValueError(f"basis index out of range for {n} qubits")
    if not np.all(np.isfinite(amps)):
        raise ValueError("amplitudes must be finite")
    norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    if normalize:
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        amps = amps / norm
    elif abs(norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"amplitudes have norm {norm}, expected 1")
    nz = amps != 0
    return _backend(backend).from_entries(n, keys[nz], amps[nz])


def random_state(n: int, rng: np.random.Generator, backend: str = "sparse") -> QuantumState:
    """Haar-ish random pure state (normalized complex Gaussian vector)."""
    vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return from_amplitudes(n, vec, backend=backend, normalize=True)


def convert(state: QuantumState, backend: str) -> QuantumState:
    keys, amps = state.entries()
    return _backend(backend).from_entries(state.n, keys, amps)


def tensor(low: QuantumState, high: QuantumState) -> QuantumState:
    """``|high> (x) |low>``: ``low`` occupies qubits ``0..low.n-1``, ``high`` the rest."""
    ka, aa = low.entries()
    kb, ab = high.entries()
    keys = (ka[:, None] | (kb[None, :] << low.n)).ravel()
    amps = (aa[:, None] * ab[None, :]).ravel()
    return type(low).from_entries(low.n + high.n, keys, amps)


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    return state.apply(gate)


def apply_circuit(state: QuantumState, circuit: Circuit) -> QuantumState:
    if circuit.n > state.n:
        raise ValueError(f"circuit needs {circuit.n} qubits, state has {state.n}")
    for g in circuit:
        state = state.apply(g)
    return state


def norm(state: QuantumState) -> float:
    _, amps = state.entries()
    return math.sqrt(float(np.sum(np.abs(amps) ** 2)))


def _check_qubit(state: QuantumState, qubit: int) -> None:
    if not 0 <= qubit < state.n:
        raise ValueError(f"qubit {qubit} out of range for {state.n} qubits")


def probability_of(state: QuantumState, qubit: int, bit: int) -> float:
    """Probability that measuring ``qubit`` yields ``bit``."""
    _check_qubit(state, qubit)
    keys, amps = state.entries()
    sel = ((keys >> qubit) & 1) == bit
    p = float(np.sum(np.abs(amps[sel]) ** 2))
    return min(max(p, 0.0), 1.0)


def marginal(state: QuantumState, qubits: Sequence[int]) -> dict[int, float]:
    """Exact joint distribution over ``qubits``; bit j of an outcome is ``qubits[j]``."""
    for q in qubits:
        _check_qubit(state, q)
    keys, amps = state.entries()
    codes = np.zeros_like(keys)
    for j, q in enumerate(qubits):
        codes |= ((keys >> q) & 1) << j
    probs = np.abs(amps) ** 2
    uniq, inverse = np.unique(codes, return_inverse=True)
    totals = np.bincount(inverse, weights=probs, minlength=len(uniq))
    return {int(u): float(p) for u, p in zip(uniq, totals) if p > 0}


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    bit: int
    probability: float


def measure_qubit(state: QuantumState, qubit: int, rng: np.random.Generator):
    """Projective Z measurement; returns ``(record, collapsed_state)``."""
    p1 = probability_of(state, qubit, 1)
    bit = int(rng.random() < p1)
    p = p1 if bit else 1.0 - p1
    if p < 1e-9:
        raise RuntimeError(f"degenerate branch: sampled outcome with probability {p}")
    keys, amps = state.entries()
    sel = ((keys >> qubit) & 1) == bit
    post = type(state).from_entries(state.n, keys[sel], amps[sel] / math.sqrt(p))
    return MeasurementRecord(qubit, bit, p), post


def sample_counts(state: QuantumState, qubits: Sequence[int], shots: int,
                  rng: np.random.Generator) -> dict[int, int]:
    """Draw ``shots`` independent outcomes over ``qubits`` without collapsing."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    dist = marginal(state, qubits)
    outcomes = list(dist)
    p = np.array([dist[o] for o in outcomes])
    counts = rng.multinomial(shots, p / p.sum())
    return {o: int(c) for o, c in zip(outcomes, counts) if c}


def format_outcome(outcome: int, width: int) -> str:
    """Bitstring with the first listed qubit as the rightmost character."""
    return format(outcome, f"0{width}b")


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} vs {b.n}")
    ka, aa = a.entries()
    kb, ab = b.entries()
    _, ia, ib = np.intersect1d(ka, kb, assume_unique=True, return_indices=True)
    return complex(np.sum(np.conj(aa[ia]) * ab[ib]))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Matrix whose column j is the circuit applied to ``|j>``."""
    n = circuit.n
    if n > MAX_UNITARY_QUBITS:
        raise ResourceLimitError(f"unitary of {n} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit limit")
    u = np.eye(1 << n, dtype=np.complex128)
    for g in circuit:
        u = _dense_apply(u, n, g)
    return u
