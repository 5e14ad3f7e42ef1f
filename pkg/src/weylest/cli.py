"""Command-line interface.

Subcommands mirror the library surface: find-config, gen-channel, simulate,
estimate, experiment, report.  Every subcommand accepts --seed and --out;
deterministic subcommands accept the seed for interface uniformity and
ignore it.  Exit code 0 on success, 1 with a diagnostic on any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import ChannelParams, make_depolarizing, make_exp_corr_channel
from .design import find_config, default_cache_dir
from .estimate import (
    correct_estimate,
    dpepc_estimate,
    dpepc_estimate_block_mitigated,
    mitigate_depolarizing,
    ope_estimate,
)
from .experiment import (
    format_report,
    load_spec,
    read_csv,
    report,
    run_experiment,
    write_csv,
    write_run_meta,
)
from .simulate import CountVector, rng_stream, simulate_dpepc, simulate_ope
from .weyl import WeylIndex

COUNTS_FORMAT_VERSION = 1


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0, help="master seed for random streams")
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--cache-dir", default=None, help="measurement-config cache directory")


def _cache_dir(args):
    return Path(args.cache_dir) if args.cache_dir is not None else default_cache_dir()


def _write_json(payload: dict, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
            fh.write("\n")
    else:
        json.dump(payload, sys.stdout)
        sys.stdout.write("\n")


def cmd_find_config(args) -> int:
    cfg = find_config(args.d, cache_dir=_cache_dir(args))
    if args.out:
        _write_json(cfg.to_record(), args.out)
    cache_path = _cache_dir(args) / f"config_d{args.d}.json"
    print(f"d={cfg.d} K={cfg.K} rank={cfg.rank} cache={cache_path}")
    return 0


def cmd_gen_channel(args) -> int:
    if (args.gamma is None) == (args.kappa is None):
        raise ValueError("specify exactly one of --gamma or --kappa")
    if args.gamma is not None:
        ch = make_exp_corr_channel(args.d, args.gamma)
    else:
        ch = make_depolarizing(args.d, args.kappa)
    _write_json(ch.to_record(), args.out)
    return 0


def _load_channel(path) -> ChannelParams:
    with open(path, encoding="utf-8") as fh:
        return ChannelParams.from_record(json.load(fh))


def cmd_simulate(args) -> int:
    ch = _load_channel(args.channel)
    rng = rng_stream(args.seed)
    if args.protocol == "dpepc":
        cfg = find_config(ch.d, cache_dir=_cache_dir(args))
        blocks = simulate_dpepc(ch, cfg, args.n_uses, args.kappa, rng)
    else:
        blocks = [simulate_ope(ch, args.n_uses, args.kappa, rng)]
    payload = {
        "format_version": COUNTS_FORMAT_VERSION,
        "protocol": args.protocol,
        "d": ch.d,
        "kappa": args.kappa,
        "n_uses": args.n_uses,
        "seed": args.seed,
        "blocks": [
            {
                "probe": None if cv.probe is None else cv.probe.kbar,
                "shots": cv.shots,
                "counts": cv.counts.tolist(),
            }
            for cv in blocks
        ],
    }
    _write_json(payload, args.out)
    return 0


def cmd_estimate(args) -> int:
    with open(args.counts, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format_version") != COUNTS_FORMAT_VERSION:
        raise ValueError(f"unsupported counts record version {payload.get('format_version')!r}")
    d = payload["d"]
    blocks = [
        CountVector(
            probe=None if blk["probe"] is None else WeylIndex.from_flat(blk["probe"], d),
            counts=np.asarray(blk["counts"], dtype=np.int64),
            shots=blk["shots"],
        )
        for blk in payload["blocks"]
    ]
    if payload["protocol"] == "dpepc":
        cfg = find_config(d, cache_dir=_cache_dir(args))
        if args.mitigate_kappa is not None and args.block_mitigation:
            est = dpepc_estimate_block_mitigated(blocks, cfg, args.mitigate_kappa)
        else:
            est = dpepc_estimate(blocks, cfg)
            if args.mitigate_kappa is not None:
                est = mitigate_depolarizing(est, args.mitigate_kappa)
    else:
        est = ope_estimate(blocks[0])
        if args.mitigate_kappa is not None:
            est = mitigate_depolarizing(est, args.mitigate_kappa)
    if args.correct:
        est = correct_estimate(est)
    record = est.to_record()
    record["meta"]["seed"] = payload.get("seed")  # trace back to the measurement run
    _write_json(record, args.out)
    return 0


def cmd_experiment(args) -> int:
    spec = load_spec(args.spec)
    if args.seed_given:
        spec = type(spec)(**{**spec.__dict__, "master_seed": args.seed})
    out = args.out or spec.output
    if out is None:
        raise ValueError("no output path: pass --out or set 'output' in the spec file")
    rows = run_experiment(spec, n_workers=args.workers, cache_dir=_cache_dir(args))
    write_csv(rows, out)
    write_run_meta(spec, rows, str(out) + ".meta.json", args.workers, cache_dir=_cache_dir(args))
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_report(args) -> int:
    rows = read_csv(args.csv)
    text = format_report(report(rows))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylest",
                                     description="Weyl-channel parameter estimation toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("find-config", help="find a sufficient measurement configuration")
    p.add_argument("d", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_find_config)

    p = sub.add_parser("gen-channel", help="generate a channel parameter vector")
    p.add_argument("d", type=int)
    p.add_argument("--gamma", type=float, help="exponential correlation noisiness in [0, 1]")
    p.add_argument("--kappa", type=float, help="depolarizing strength in [0, 1]")
    _add_common(p)
    p.set_defaults(func=cmd_gen_channel)

    p = sub.add_parser("simulate", help="simulate one estimation run's measurement counts")
    p.add_argument("--channel", required=True, help="channel record JSON")
    p.add_argument("--protocol", choices=("dpepc", "ope"), default="dpepc")
    p.add_argument("--n-uses", type=int, required=True)
    p.add_argument("--kappa", type=float, default=0.0, help="probe noise strength")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate channel parameters from counts")
    p.add_argument("--counts", required=True, help="counts record JSON from 'simulate'")
    p.add_argument("--mitigate-kappa", type=float, default=None,
                   help="invert known depolarizing probe noise of this strength")
    p.add_argument("--block-mitigation", action="store_true",
                   help="mitigate per measurement block instead of on the final estimate")
    p.add_argument("--correct", action="store_true", help="project onto the probability simplex")
    _add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="run a sweep described by a spec file")
    p.add_argument("spec", help="experiment spec JSON")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="summarize a results CSV")
    p.add_argument("csv")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a diagnostic, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
