"""Command-line entry point: ``qknn-lab {swap-test,grover,knn,qknn,compare}``.

Exit codes: 0 ok, 2 usage/validation, 3 data, 4 internal. Errors are printed
to stderr as a single line ``qknn-lab: error[<kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import __version__, bench, grover, sim, swap_test
from .data import DataError
from .report import emit_report, new_report

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4
DEFAULT_SEED = 42


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def _threshold(text: str) -> int | None:
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None


def _shots(text: str) -> int | None:
    if text == "exact":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'exact', got {text!r}") from None


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def default_seed() -> int:
    env = os.environ.get("QKNN_LAB_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return _seed(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"QKNN_LAB_SEED is not a valid seed: {env!r}") from None


_NAMED_STATES = {
    "0": [1, 0],
    "1": [0, 1],
    "+": [math.sqrt(0.5), math.sqrt(0.5)],
    "-": [math.sqrt(0.5), -math.sqrt(0.5)],
}


def parse_state(text: str) -> sim.QuantumState:
    """'0', '1', '+', '-', or comma-separated amplitudes (complex allowed, normalized)."""
    text = text.strip()
    if text in _NAMED_STATES:
        amps = _NAMED_STATES[text]
    else:
        try:
            amps = [complex(part.strip().replace(" ", "")) for part in text.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse state {text!r}") from None
    n = len(amps).bit_length() - 1
    if len(amps) < 2 or (1 << n) != len(amps):
        raise UsageError(f"state {text!r} needs 2**m amplitudes, got {len(amps)}")
    return sim.from_amplitudes(n, amps, normalize=True)


def _parse_marked(text: str, n: int) -> int:
    if len(text) == n and set(text) <= {"0", "1"}:
        return int(text, 2)
    try:
        return int(text, 0)
    except ValueError:
        raise UsageError(f"cannot parse marked state {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qknn-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qknn-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=_seed, default=None, help="base seed (env QKNN_LAB_SEED, else 42)")
        p.add_argument("--format", choices=("json", "csv", "text"), default="text")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("swap-test", help="swap-test fidelity of two states")
    p.add_argument("--x", default="0", help="first state: 0, 1, +, - or amplitudes a,b,...")
    p.add_argument("--y", default="0", help="second state")
    p.add_argument("--shots", type=_shots, default=None, help="INT or 'exact' (default)")
    common(p)

    p = sub.add_parser("grover", help="Grover search demo")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--marked", default=None, help="n-char bitstring (qubit n-1 first) or integer")
    p.add_argument("--iterations", type=int, default=None, help="default: floor(pi/4 sqrt(2**n))")
    p.add_argument("--backend", choices=("sparse", "dense"), default="sparse")
    common(p)

    for name, help_text in (("knn", "classical KNN on WDBC"), ("qknn", "quantum KNN on WDBC"),
                            ("compare", "KNN vs QKNN on identical splits")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--data", default=None, help="WDBC CSV (default: bundled copy)")
        p.add_argument("--split", type=float, default=0.65, help="train fraction")
        p.add_argument("--reps", type=int, default=10 if name == "compare" else 1)
        p.add_argument("--k", type=int, default=13)
        if name in ("knn", "compare"):
            p.add_argument("--k-range", type=_int_range, default=None, help="K sweep A..B")
        if name in ("qknn", "compare"):
            p.add_argument("--threshold", type=_threshold, default=None, help="INT or 'auto' (default)")
            p.add_argument("--k-for-auto", type=int, default=None, help="k used to calibrate t (default --k)")
            p.add_argument("--t-range", type=_int_range, default=None, help="fixed-threshold sweep A..B")
            p.add_argument("--shots", type=_shots, default=None, help="INT or 'exact' (default)")
            p.add_argument("--backend", choices=("sparse", "dense"), default="sparse")
            p.add_argument("--flag-mode", choices=("offset-carry", "or-highbits"), default="offset-carry")
        p.add_argument("--sweep-csv", default=None, help="write K/t sweep plot data here")
        common(p)
    return parser


def cmd_swap_test(args) -> dict:
    x, y = parse_state(args.x), parse_state(args.y)
    if x.n != y.n:
        raise UsageError(f"states differ in size: {x.n} vs {y.n} qubits")
    report = new_report("swap-test", {"x": args.x, "y": args.y, "shots": args.shots or "exact",
                                      "seed": args.seed})
    p0 = swap_test.swap_test_p0(x, y)
    fidelity = swap_test.fidelity_from_p0(p0)
    results = {"p0": p0, "fidelity": fidelity, "distance": swap_test.quantum_euclidean_distance(fidelity)}
    if args.shots is not None:
        est = swap_test.swap_test_sampled(x, y, args.shots, np.random.default_rng(args.seed))
        results.update(p0_sampled=est.p0, fidelity_sampled=est.fidelity, clamped=est.clamped)
    report["results"] = results
    return report


def cmd_grover(args) -> dict:
    n = args.n
    marked = (1 << n) - 1 if args.marked is None else _parse_marked(args.marked, n)
    iterations = grover.optimal_iterations(n) if args.iterations is None else args.iterations
    spec = grover.GroverSpec(n, marked, iterations)
    result = grover.grover_search(spec, np.random.default_rng(args.seed), backend=args.backend)
    report = new_report("grover", {"n": n, "marked": marked, "iterations": iterations,
                                   "backend": args.backend, "seed": args.seed})
    report["results"] = {
        "n": n,
        "marked": marked,
        "marked_bits": sim.format_outcome(marked, n),
        "iterations": iterations,
        "marked_probability": result.probability(marked),
        "distribution": {sim.format_outcome(o, n): p for o, p in result.distribution.items()},
        "sampled": sim.format_outcome(result.sampled, n),
    }
    return report


def _run_config(args) -> bench.RunConfig:
    return bench.RunConfig(
        command=args.command,
        data=args.data,
        seed=args.seed,
        split=args.split,
        k=args.k,
        k_range=getattr(args, "k_range", None),
        threshold=getattr(args, "threshold", None),
        k_for_auto=getattr(args, "k_for_auto", None),
        t_range=getattr(args, "t_range", None),
        shots=getattr(args, "shots", None),
        backend=getattr(args, "backend", "sparse"),
        flag_mode=getattr(args, "flag_mode", "offset-carry"),
        reps=args.reps,
    )


def cmd_experiment(args) -> dict:
    report = bench.run_experiment(_run_config(args))
    if args.sweep_csv:
        with open(args.sweep_csv, "w", encoding="utf-8") as fh:
            fh.write(bench.sweep_csv(report))
    return report


cmd_knn = cmd_qknn = cmd_compare = cmd_experiment

_COMMANDS = {"swap-test": cmd_swap_test, "grover": cmd_grover, "knn": cmd_knn,
             "qknn": cmd_qknn, "compare": cmd_compare}


def _fail(kind: str, message: str, code: int) -> int:
    message = " ".join(str(message).split())
    print(f"qknn-lab: error[{kind}]: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = default_seed()
        started = time.perf_counter()
        report = _COMMANDS[args.command](args)
        report["timing"].setdefault("total_seconds", time.perf_counter() - started)
        emit_report(report, args.format, args.out)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (DataError, OSError) as exc:
        return _fail("data", exc, EXIT_DATA)
    except ValueError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except Exception as exc:  # noqa: BLE001
        return _fail("internal", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
