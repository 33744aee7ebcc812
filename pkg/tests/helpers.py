"""Shared test utilities: random circuits and brute-force oracles."""

import numpy as np

from qknn_lab import sim

ONE_QUBIT = ("H", "X", "ID")


def random_gate(n, rng):
    kinds = ["H", "X", "ID"]
    if n >= 2:
        kinds += ["CNOT", "SWAP", "MCX"]
    if n >= 3:
        kinds += ["CCX", "CSWAP"]
    kind = kinds[rng.integers(len(kinds))]
    if kind in ONE_QUBIT:
        return sim.Gate(kind, (int(rng.integers(n)),))
    if kind == "MCX":
        k = int(rng.integers(0, min(n - 1, 4) + 1))
        qs = rng.choice(n, size=k + 1, replace=False).tolist()
        return sim.MCX(qs[:-1], qs[-1])
    width = {"CNOT": 2, "SWAP": 2, "CCX": 3, "CSWAP": 3}[kind]
    qs = rng.choice(n, size=width, replace=False).tolist()
    return {"CNOT": lambda: sim.CNOT(*qs), "SWAP": lambda: sim.SWAP(*qs),
            "CCX": lambda: sim.CCX(*qs), "CSWAP": lambda: sim.CSWAP(*qs)}[kind]()


def random_circuit(n, n_gates, rng):
    return sim.Circuit(n, [random_gate(n, rng) for _ in range(n_gates)])


def popcount_distance(a, b):
    return bin(int("".join(map(str, a)), 2) ^ int("".join(map(str, b)), 2)).count("1")


def brute_force_qknn(items, test, t, n_classes):
    """Counting oracle: (acceptance, conditional class distribution)."""
    within = [label for bits, label in items if popcount_distance(bits, test) < t]
    if not within:
        return 0.0, None
    dist = {c: within.count(c) / len(within) for c in range(n_classes)}
    return len(within) / len(items), dist
