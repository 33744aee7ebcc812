"""Run reports: JSON (versioned), CSV (one row per seed x algorithm) or text."""

from __future__ import annotations

import csv
import io
import json
import statistics
import sys
from pathlib import Path

from . import __version__

SCHEMA_VERSION = 1
TIMING_KEY = "timing"


def new_report(command: str, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "qknn-lab",
        "version": __version__,
        "command": command,
        "config": config,
        "results": {},
        TIMING_KEY: {},
    }


def without_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != TIMING_KEY}


def summarize(values) -> dict:
    values = list(values)
    return {
        "mean": statistics.fmean(values) if values else None,
        "std": statistics.stdev(values) if len(values) > 1 else 0.0,
        "per_seed": values,
    }


def _csv_rows(report: dict) -> tuple[list[str], list[list]]:
    results = report["results"]
    if report["command"] in ("knn", "qknn", "compare"):
        header = ["seed", "algorithm", "accuracy", "k", "threshold", "mean_acceptance", "split_hash"]
        rows = []
        for run in results["runs"]:
            for algo in ("knn", "qknn"):
                if algo not in run:
                    continue
                r = run[algo]
                rows.append([run["seed"], algo, r["accuracy"], r.get("k", ""), r.get("threshold", ""),
                             r.get("mean_acceptance", ""), run["split_hash"]])
        return header, rows
    if report["command"] == "grover":
        return ["outcome", "probability"], [[o, p] for o, p in results["distribution"].items()]
    if report["command"] == "swap-test":
        keys = ["p0", "fidelity", "distance", "p0_sampled", "fidelity_sampled"]
        return keys, [[results.get(k, "") for k in keys]]
    raise ValueError(f"no CSV layout for command {report['command']!r}")


def to_csv(report: dict) -> str:
    header, rows = _csv_rows(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(v) -> str:
    return f"{v:.4f}" if isinstance(v, float) else str(v)


def to_text(report: dict) -> str:
    results = report["results"]
    cmd = report["command"]
    lines = [f"qknn-lab {report['version']} :: {cmd}"]
    if cmd == "swap-test":
        for key in ("p0", "fidelity", "distance", "p0_sampled", "fidelity_sampled", "clamped"):
            if key in results:
                lines.append(f"  {key:<17}{_fmt(results[key])}")
    elif cmd == "grover":
        lines.append(f"  n={results['n']} marked={results['marked_bits']} iterations={results['iterations']}")
        for outcome, p in results["distribution"].items():
            lines.append(f"  |{outcome}>  {p:.6f}")
        lines.append(f"  sampled: {results['sampled']}")
    else:
        algos = [a for a in ("knn", "qknn") if a in results]
        lines.append("  seed    " + "".join(f"{a.upper():>10}" for a in algos)
                     + ("      diff" if len(algos) == 2 else ""))
        for run in results["runs"]:
            row = f"  {run['seed']:<8}" + "".join(f"{run[a]['accuracy']:>10.4f}" for a in algos)
            if len(algos) == 2:
                row += f"{run['difference']:>+10.4f}"
            lines.append(row)
        lines.append("  " + "-" * (8 + 10 * len(algos)))
        lines.append("  mean    " + "".join(f"{results[a]['mean']:>10.4f}" for a in algos))
        lines.append("  std     " + "".join(f"{results[a]['std']:>10.4f}" for a in algos))
        for key, label in (("k_sweep", "k"), ("t_sweep", "t")):
            if key in results:
                lines.append(f"  {label}-sweep (mean accuracy over seeds):")
                for point in results[key]:
                    lines.append(f"    {label}={point[label]:<4} {point['accuracy']:.4f}")
    if TIMING_KEY in report and report[TIMING_KEY]:
        lines.append(f"  elapsed {report[TIMING_KEY].get('total_seconds', 0):.2f}s")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report: dict, fmt: str = "json", path=None) -> None:
    text = render(report, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
