#!/usr/bin/env python3
"""Seeding-comparison benchmark: graph-sampled vs k++ vs random initialization.

Sweeps the neighborhood radius for the graph-sampled seeder on each dataset,
then reruns every algorithm at the sweep's best radius with a larger trial
budget and prints one combined table.

Typical use:
    python3 scripts/run_seeding_benchmark.py --quick
    python3 scripts/run_seeding_benchmark.py --trials 500 --out results/seeding
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from quac.harness import (
    ExperimentSpec,
    epsilon_sweep,
    optimal_epsilon,
    report,
    run_experiment,
)

GRIDS = {
    "five_cluster": (1.5, 2.0, 2.5, 3.0, 4.0, 5.0),
    "elliptical": (1.0, 1.5, 2.0, 2.5),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dataset", choices=sorted(GRIDS), action="append",
                    help="restrict to one dataset (repeatable; default both)")
    ap.add_argument("--trials", type=int, default=500, help="trials at the optimal radius")
    ap.add_argument("--sweep-trials", type=int, default=30, help="trials per sweep grid point")
    ap.add_argument("--root-seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="20 final trials, 10 per grid point")
    ap.add_argument("--out", help="prefix for per-record CSV/JSON files")
    args = ap.parse_args(argv)

    if args.quick:
        args.trials, args.sweep_trials = 20, 10

    final_records = []
    for dataset in args.dataset or sorted(GRIDS):
        base = ExperimentSpec(dataset=dataset, algorithm="qmeans",
                              eps_grid=GRIDS[dataset],
                              trials=args.sweep_trials, root_seed=args.root_seed)
        sweep = epsilon_sweep(base)
        print(f"== {dataset}: radius sweep ({args.sweep_trials} trials/point) ==")
        print(report(sweep))
        best = optimal_epsilon(sweep, by="success_rate")
        print(f"best radius: {best:g}\n")

        for algorithm in ("qmeans", "kpp", "random"):
            spec = replace(base, algorithm=algorithm, eps_grid=(),
                           eps=best if algorithm == "qmeans" else None,
                           trials=args.trials)
            rec = run_experiment(spec)
            final_records.append(rec)
            if args.out:
                stem = f"{args.out}_{dataset}_{algorithm}"
                rec.to_csv(f"{stem}.csv")
                rec.to_json(f"{stem}.json")

    print(f"== final comparison ({args.trials} trials) ==")
    print(report(final_records))
    return 0


if __name__ == "__main__":
    sys.exit(main())
