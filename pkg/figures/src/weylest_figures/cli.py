"""Command line for figure rendering: render --spec, or one shortcut per kind."""

from __future__ import annotations

import argparse
import sys

from .plots import KINDS, PlotSpec, load_plot_spec, render


def _add_shortcut(sub, kind: str):
    p = sub.add_parser(kind, help=f"render a {kind} figure")
    p.add_argument("--csv", nargs="+", required=True, help="results CSV path(s)")
    p.add_argument("--out", required=True, help="output image path (SVG by default)")
    p.add_argument("--metric", default=None, help="accuracy column; defaults per figure kind")
    p.add_argument(
        "--filter",
        action="append",
        default=[],
        metavar="COLUMN=VALUE",
        help="keep only rows with this column value; repeatable",
    )
    p.set_defaults(kind=kind)


def _parse_filters(pairs):
    filters = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"bad filter {pair!r}; expected COLUMN=VALUE")
        column, value = pair.split("=", 1)
        filters.setdefault(column, []).append(value)
    return {c: (v[0] if len(v) == 1 else v) for c, v in filters.items()}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylest-figures",
                                     description="render figures from results CSVs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render from a plot-spec JSON file")
    p.add_argument("--spec", required=True)
    p.set_defaults(kind=None)

    for kind in ("scaling", "mitigation", "surface", "kvd"):
        _add_shortcut(sub, kind)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.kind is None:
            spec = load_plot_spec(args.spec)
        else:
            spec = PlotSpec(
                kind=args.kind,
                csv=tuple(args.csv),
                out=args.out,
                filters=_parse_filters(args.filter),
                metric=args.metric,
            )
        out = render(spec)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
