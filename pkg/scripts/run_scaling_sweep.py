#!/usr/bin/env python3
"""Accuracy vs channel uses for both estimators (scaling study).

Writes a results CSV comparing the separable-probe and entangled-probe
estimators across a channel-use sweep, with and without probe noise.
"""

import argparse
from pathlib import Path

from weylest.experiment import ExperimentSpec, run_experiment, write_csv, write_run_meta


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+", default=[5])
    parser.add_argument("--gamma", type=float, default=0.7)
    parser.add_argument("--kappas", type=float, nargs="+", default=[0.0, 0.5])
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=20250810)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--out", default="results/scaling_d5.csv")
    args = parser.parse_args()

    spec = ExperimentSpec(
        ds=args.dims,
        gammas=[args.gamma],
        kappas=args.kappas,
        n_uses=[10**3, 10**4, 10**5, 10**6],
        trials=args.trials,
        estimators=("dpepc", "ope"),
        mitigation=("none",),
        master_seed=args.seed,
    )
    rows = run_experiment(spec, n_workers=args.workers)
    write_csv(rows, args.out)
    write_run_meta(spec, rows, str(args.out) + ".meta.json", args.workers)
    print(f"wrote {len(rows)} rows to {Path(args.out)}")


if __name__ == "__main__":
    main()
