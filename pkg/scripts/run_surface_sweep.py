#!/usr/bin/env python3
"""MSE surface over channel noisiness and probe-noise strength at fixed N."""

import argparse
from pathlib import Path

from weylest.experiment import ExperimentSpec, run_experiment, write_csv, write_run_meta


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, default=7)
    parser.add_argument("--gammas", type=float, nargs="+",
                        default=[0.1, 0.3, 0.5, 0.7, 0.9])
    parser.add_argument("--kappas", type=float, nargs="+",
                        default=[0.0, 0.3, 0.6, 0.9])
    parser.add_argument("--n-uses", type=int, default=10**5)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=20250810)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    out = args.out or f"results/surface_d{args.d}.csv"

    spec = ExperimentSpec(
        ds=[args.d],
        gammas=args.gammas,
        kappas=args.kappas,
        n_uses=[args.n_uses],
        trials=args.trials,
        estimators=("dpepc",),
        mitigation=("none",),
        master_seed=args.seed,
    )
    rows = run_experiment(spec, n_workers=args.workers)
    write_csv(rows, out)
    write_run_meta(spec, rows, str(out) + ".meta.json", args.workers)
    print(f"wrote {len(rows)} rows to {Path(out)}")


if __name__ == "__main__":
    main()
