"""Full WDBC comparison: 10 seeds, k and t sweeps, JSON report plus CSVs.

    python scripts/run_benchmark.py results/
"""

import argparse
from pathlib import Path

from qknn_lab import bench
from qknn_lab.report import emit_report


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", type=Path)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--reps", type=int, default=10)
    args = parser.parse_args()

    cfg = bench.RunConfig("compare", seed=args.seed, reps=args.reps, k=13,
                          k_range=(1, 25), t_range=(1, 11))
    report = bench.run_experiment(cfg)
    args.outdir.mkdir(parents=True, exist_ok=True)
    emit_report(report, "json", args.outdir / "compare.json")
    emit_report(report, "csv", args.outdir / "compare.csv")
    (args.outdir / "sweeps.csv").write_text(bench.sweep_csv(report))
    emit_report(report, "text")


if __name__ == "__main__":
    main()
