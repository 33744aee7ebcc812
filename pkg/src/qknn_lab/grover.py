"""Grover search with a phase oracle and the standard diffusion operator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sim import Circuit, H, X, apply_circuit, controlled_x, marginal, new_basis_state, sample_counts


@dataclass(frozen=True)
class GroverSpec:
    n: int
    marked: int
    iterations: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.marked < (1 << self.n):
            raise ValueError(f"marked state {self.marked} out of range for {self.n} qubits")
        if not 0 <= self.iterations <= (1 << self.n):
            raise ValueError(f"iterations must lie in [0, 2**n], got {self.iterations}")


def _phase_flip_all_ones(n: int) -> list:
    # multi-controlled Z on the last qubit as H . MCX . H
    target = n - 1
    return [H(target), controlled_x(range(target), target), H(target)]


def build_oracle(n: int, marked: int) -> Circuit:
    """Circuit that negates the amplitude of ``|marked>`` and nothing else."""
    if not 0 <= marked < (1 << n):
        raise ValueError(f"marked state {marked} out of range for {n} qubits")
    zeros = [X(q) for q in range(n) if not (marked >> q) & 1]
    return Circuit(n, zeros + _phase_flip_all_ones(n) + zeros)


def build_diffusion(n: int) -> Circuit:
    """Reflection about the uniform superposition.

    The H/X/MCZ/X/H construction realizes ``I - 2|s><s|``, which is
    ``2|s><s| - I`` up to a global sign.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    hs = [H(q) for q in range(n)]
    xs = [X(q) for q in range(n)]
    return Circuit(n, hs + xs + _phase_flip_all_ones(n) + xs + hs)


def optimal_iterations(n: int) -> int:
    """floor(pi/4 * sqrt(2**n)), at least 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(1, math.floor(math.pi / 4 * math.sqrt(2 ** n)))


def success_probability(n: int, iterations: int) -> float:
    """Closed form sin^2((2k+1) theta) with sin(theta) = 2**(-n/2)."""
    theta = math.asin(2 ** (-n / 2))
    return math.sin((2 * iterations + 1) * theta) ** 2


@dataclass(frozen=True)
class GroverResult:
    distribution: dict[int, float]
    sampled: int

    def probability(self, outcome: int) -> float:
        return self.distribution.get(outcome, 0.0)


def grover_state(spec: GroverSpec, backend: str = "sparse"):
    state = apply_circuit(new_basis_state(spec.n, 0, backend), Circuit(spec.n, [H(q) for q in range(spec.n)]))
    step = build_oracle(spec.n, spec.marked) + build_diffusion(spec.n)
    for _ in range(spec.iterations):
        state = apply_circuit(state, step)
    return state


def grover_search(spec: GroverSpec, rng: np.random.Generator, backend: str = "sparse") -> GroverResult:
    state = grover_state(spec, backend)
    qubits = list(range(spec.n))
    distribution = {k: v for k, v in sorted(marginal(state, qubits).items()) if v > 1e-15}
    (sampled,) = sample_counts(state, qubits, 1, rng)
    return GroverResult(distribution, sampled)
