"""Declarative experiment runner: parameter sweeps to a results CSV.

A sweep is the cross product of dimensions, channel noisiness values,
probe-noise strengths, and channel-use budgets; every grid point runs a
fixed number of independent trials per estimator, and each requested
mitigation variant is derived from the same simulated counts, so variants
are compared on identical data.

Random streams are keyed by (master seed, grid index, estimator, trial)
and rows are assembled in grid order, so the CSV bytes are identical for
any worker count.  The wall_time column is the one timing field and is
the only column excluded from determinism comparisons.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, asdict
from datetime import datetime, timezone
from pathlib import Path

from .channels import ChannelParams, make_exp_corr_channel
from .design import MeasurementConfig, find_config
from .estimate import (
    Estimate,
    correct_estimate,
    dpepc_estimate,
    mitigate_depolarizing,
    ope_estimate,
)
from .metrics import TrialBatch, bias_norm, mean_diamond, summed_mse, summed_variance
from .simulate import rng_stream, simulate_dpepc, simulate_ope

SPEC_FORMAT_VERSION = 1
ESTIMATORS = ("dpepc", "ope")
MITIGATION_VARIANTS = ("none", "mitigate", "mitigate+correct")


@dataclass(frozen=True)
class ExperimentSpec:
    """Sweep description; the cross product of the lists forms the grid."""

    ds: tuple[int, ...]
    gammas: tuple[float, ...]
    kappas: tuple[float, ...]
    n_uses: tuple[int, ...]
    trials: int = 200
    estimators: tuple[str, ...] = ("dpepc", "ope")
    mitigation: tuple[str, ...] = ("none",)
    master_seed: int = 0
    output: str | None = None

    def __post_init__(self):
        for name in ("ds", "gammas", "kappas", "n_uses", "estimators", "mitigation"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise ValueError(f"spec field {name!r} must be non-empty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        for est in self.estimators:
            if est not in ESTIMATORS:
                raise ValueError(f"unknown estimator {est!r}; expected one of {ESTIMATORS}")
        for variant in self.mitigation:
            if variant not in MITIGATION_VARIANTS:
                raise ValueError(
                    f"unknown mitigation variant {variant!r}; expected one of {MITIGATION_VARIANTS}"
                )

    def grid(self):
        points = []
        for d in self.ds:
            for gamma in self.gammas:
                for kappa in self.kappas:
                    for n in self.n_uses:
                        points.append((d, gamma, kappa, n))
        return points


_SPEC_FIELDS = {
    "format_version": None,
    "d": "ds",
    "gamma": "gammas",
    "kappa": "kappas",
    "n_uses": "n_uses",
    "trials": "trials",
    "estimators": "estimators",
    "mitigation": "mitigation",
    "master_seed": "master_seed",
    "output": "output",
}


def spec_from_dict(data: dict) -> ExperimentSpec:
    version = data.get("format_version")
    if version != SPEC_FORMAT_VERSION:
        raise ValueError(f"spec field 'format_version' must be {SPEC_FORMAT_VERSION}, got {version!r}")
    unknown = sorted(set(data) - set(_SPEC_FIELDS))
    if unknown:
        raise ValueError(f"unknown spec fields: {', '.join(unknown)}")
    missing = [k for k in ("d", "gamma", "kappa", "n_uses") if k not in data]
    if missing:
        raise ValueError(f"missing spec fields: {', '.join(missing)}")
    kwargs = {}
    for key, attr in _SPEC_FIELDS.items():
        if attr is not None and key in data:
            kwargs[attr] = data[key]
    return ExperimentSpec(**kwargs)


def load_spec(path) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed spec at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return spec_from_dict(data)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class ResultRow:
    """One CSV record: aggregate accuracy of one pipeline at one grid point."""

    d: int
    K: int
    gamma: float
    kappa: float
    n_uses: int
    estimator: str
    mitigated: bool
    corrected: bool
    trials: int
    seed: int
    summed_variance: float
    summed_mse: float
    mean_diamond: float
    bias_norm: float
    wall_time: float


CSV_COLUMNS = tuple(f.name for f in fields(ResultRow))


def _variant_estimates(raw: Estimate, variant: str, kappa: float) -> Estimate:
    if variant == "none":
        return raw
    mitigated = mitigate_depolarizing(raw, kappa)
    if variant == "mitigate":
        return mitigated
    return correct_estimate(mitigated)


def _run_cell(
    spec: ExperimentSpec,
    grid_index: int,
    point,
    estimator: str,
    channel: ChannelParams,
    cfg: MeasurementConfig,
) -> list[ResultRow]:
    d, gamma, kappa, n = point
    start = time.perf_counter()
    raws = []
    est_id = ESTIMATORS.index(estimator)
    for trial in range(spec.trials):
        rng = rng_stream(spec.master_seed, grid_index, est_id, trial)
        if estimator == "dpepc":
            raws.append(dpepc_estimate(simulate_dpepc(channel, cfg, n, kappa, rng), cfg))
        else:
            raws.append(ope_estimate(simulate_ope(channel, n, kappa, rng)))
    rows = []
    for variant in spec.mitigation:
        if "mitigate" in variant and kappa >= 1.0:
            continue  # mitigation is undefined at kappa = 1
        ests = [_variant_estimates(raw, variant, kappa) for raw in raws]
        batch = TrialBatch(truth=channel, estimates=ests)
        rows.append(
            ResultRow(
                d=d,
                K=cfg.K,
                gamma=gamma,
                kappa=kappa,
                n_uses=n,
                estimator=estimator,
                mitigated=ests[0].mitigated,
                corrected=ests[0].corrected,
                trials=spec.trials,
                seed=spec.master_seed,
                summed_variance=summed_variance(batch) if spec.trials > 1 else float("nan"),
                summed_mse=summed_mse(batch),
                mean_diamond=mean_diamond(batch),
                bias_norm=bias_norm(batch),
                wall_time=time.perf_counter() - start,
            )
        )
    return rows


def run_experiment(spec: ExperimentSpec, n_workers: int = 1, cache_dir=None) -> list[ResultRow]:
    """Execute the sweep; rows come back in deterministic grid order."""
    configs: dict[int, MeasurementConfig] = {d: find_config(d, cache_dir=cache_dir) for d in set(spec.ds)}
    for d, cfg in configs.items():
        smallest = min(spec.n_uses)
        if smallest < cfg.K:
            raise ValueError(f"n_uses={smallest} is below K={cfg.K} for d={d}")
    channels = {
        (d, gamma): make_exp_corr_channel(d, gamma) for d in set(spec.ds) for gamma in set(spec.gammas)
    }

    grid = spec.grid()
    tasks = [
        (gi, point, estimator)
        for gi, point in enumerate(grid)
        for estimator in spec.estimators
    ]

    def run(task):
        gi, point, estimator = task
        d, gamma, _, _ = point
        return _run_cell(spec, gi, point, estimator, channels[(d, gamma)], configs[d])

    if n_workers <= 1:
        results = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run, tasks))

    return [row for cell in results for row in cell]


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_format_value(v) for v in asdict(row).values()])
    return buf.getvalue()


def write_csv(rows: list[ResultRow], path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


def csv_determinism_view(text: str) -> str:
    """CSV text with the wall_time column dropped; the rest must be reproducible."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    drop = CSV_COLUMNS.index("wall_time")
    for line in csv.reader(io.StringIO(text)):
        if line:
            writer.writerow(line[:drop] + line[drop + 1 :])
    return out.getvalue()


_COLUMN_TYPES = {f.name: f.type for f in fields(ResultRow)}


def _parse_value(name: str, text: str):
    kind = _COLUMN_TYPES[name]
    if kind == "bool":
        if text not in ("true", "false"):
            raise ValueError(f"column {name!r}: expected true/false, got {text!r}")
        return text == "true"
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def read_csv(path) -> list[ResultRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: header does not match the results schema")
        return [
            ResultRow(**{name: _parse_value(name, cell) for name, cell in zip(CSV_COLUMNS, line)})
            for line in reader
            if line
        ]


def write_run_meta(spec: ExperimentSpec, rows: list[ResultRow], path, n_workers: int, cache_dir=None) -> None:
    """Sidecar record of modeling choices and bookkeeping for one run."""
    configs = {d: find_config(d, cache_dir=cache_dir) for d in set(spec.ds)}
    discarded = {
        f"d={d},n_uses={n}": n - configs[d].K * (n // configs[d].K)
        for d in spec.ds
        for n in spec.n_uses
    }
    meta = {
        "format_version": 1,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "spec": {
            "format_version": SPEC_FORMAT_VERSION,
            "d": list(spec.ds),
            "gamma": list(spec.gammas),
            "kappa": list(spec.kappas),
            "n_uses": list(spec.n_uses),
            "trials": spec.trials,
            "estimators": list(spec.estimators),
            "mitigation": list(spec.mitigation),
            "master_seed": spec.master_seed,
        },
        "probe_noise_model": "single-qudit depolarizing acting before the channel, both protocols",
        "discarded_shots": discarded,
        "rows": len(rows),
        "workers": n_workers,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def report(rows: list[ResultRow]):
    """Per-pipeline scaling summary: log-log slopes and the largest-N plateau."""
    from .metrics import loglog_slope

    groups: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        groups.setdefault(
            (row.d, row.gamma, row.kappa, row.estimator, row.mitigated, row.corrected), []
        ).append(row)

    summary = []
    for key in sorted(groups, key=str):
        rs = sorted(groups[key], key=lambda r: r.n_uses)
        entry = {
            "d": key[0],
            "gamma": key[1],
            "kappa": key[2],
            "estimator": key[3],
            "mitigated": key[4],
            "corrected": key[5],
            "points": len(rs),
            "mse_at_max_n": rs[-1].summed_mse,
        }
        pts = [(r.n_uses, r.summed_mse) for r in rs if r.summed_mse > 0]
        entry["mse_slope"] = loglog_slope(pts) if len(pts) >= 3 else float("nan")
        var_pts = [(r.n_uses, r.summed_variance) for r in rs if r.summed_variance > 0]
        entry["variance_slope"] = loglog_slope(var_pts) if len(var_pts) >= 3 else float("nan")
        summary.append(entry)
    return summary


def format_report(summary: list[dict]) -> str:
    cols = ["d", "gamma", "kappa", "estimator", "mitigated", "corrected",
            "points", "variance_slope", "mse_slope", "mse_at_max_n"]
    lines = ["  ".join(f"{c:>14}" for c in cols)]
    for entry in summary:
        cells = []
        for c in cols:
            v = entry[c]
            cells.append(f"{v:>14.4g}" if isinstance(v, float) else f"{v!s:>14}")
        lines.append("  ".join(cells))
    return "\n".join(lines)
