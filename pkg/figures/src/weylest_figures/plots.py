"""The four figure kinds rendered from results CSVs.

scaling     log-log accuracy metric vs channel uses, one series per pipeline
surface     heatmap of summed MSE over (gamma, kappa) at fixed channel uses
mitigation  log-log MSE vs channel uses for raw / mitigated / corrected runs
kvd         configurations K vs dimension d with d+1 and 2.5 d guide lines

Rendering is read-only over the CSV and deterministic: the same input bytes
produce the same SVG bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .records import METRIC_COLUMNS, SchemaError, apply_filters, load_rows

SPEC_FORMAT_VERSION = 1
KINDS = ("scaling", "surface", "mitigation", "kvd")

plt.rcParams["svg.hashsalt"] = "weylest-figures"


DEFAULT_METRIC = {"scaling": "summed_variance", "mitigation": "summed_mse", "surface": "summed_mse"}


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input CSVs, figure kind, row filters, output path.

    metric defaults per kind: variance for scaling, MSE for mitigation and
    surface; the kvd chart uses only the d and K columns.
    """

    kind: str
    csv: tuple[str, ...]
    out: str
    filters: dict = field(default_factory=dict)
    metric: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if self.metric is None:
            object.__setattr__(self, "metric", DEFAULT_METRIC.get(self.kind, "summed_mse"))
        if self.metric not in METRIC_COLUMNS:
            raise ValueError(f"unknown metric {self.metric!r}; expected one of {METRIC_COLUMNS}")
        object.__setattr__(self, "csv", tuple(str(c) for c in (
            self.csv if isinstance(self.csv, (list, tuple)) else [self.csv]
        )))


def spec_from_dict(data: dict) -> PlotSpec:
    version = data.get("format_version")
    if version != SPEC_FORMAT_VERSION:
        raise ValueError(f"spec field 'format_version' must be {SPEC_FORMAT_VERSION}, got {version!r}")
    known = {"format_version", "kind", "csv", "out", "filters", "metric"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"unknown spec fields: {', '.join(unknown)}")
    missing = [k for k in ("kind", "csv", "out") if k not in data]
    if missing:
        raise ValueError(f"missing spec fields: {', '.join(missing)}")
    kwargs = {k: data[k] for k in ("kind", "csv", "out", "filters", "metric") if k in data}
    return PlotSpec(**kwargs)


def load_plot_spec(path) -> PlotSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed spec at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return spec_from_dict(data)


def _series_label(key: dict) -> str:
    parts = [key["estimator"], f"kappa={key['kappa']:g}"]
    if key["mitigated"]:
        parts.append("mitigated")
    if key["corrected"]:
        parts.append("corrected")
    return ", ".join(parts)


def _group_series(rows, key_columns):
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[c] for c in key_columns), []).append(row)
    for key in sorted(groups, key=str):
        members = sorted(groups[key], key=lambda r: r["n_uses"])
        yield dict(zip(key_columns, key)), members


def _save(fig, out):
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format=Path(out).suffix.lstrip(".") or "svg", metadata={"Date": None})
    plt.close(fig)


def render_scaling(rows, out, metric="summed_variance"):
    fig, ax = plt.subplots(figsize=(7, 5))
    cols = ("estimator", "kappa", "mitigated", "corrected")
    for key, members in _group_series(rows, cols):
        ns = [r["n_uses"] for r in members]
        ys = [r[metric] for r in members]
        ax.loglog(ns, ys, marker="o", label=_series_label(key))
    ax.set_xlabel("channel uses N")
    ax.set_ylabel(metric.replace("_", " "))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(f"d = {rows[0]['d']}, gamma = {rows[0]['gamma']:g}")
    _save(fig, out)


def render_mitigation(rows, out, metric="summed_mse"):
    fig, ax = plt.subplots(figsize=(7, 5))
    cols = ("estimator", "kappa", "mitigated", "corrected")
    for key, members in _group_series(rows, cols):
        ns = [r["n_uses"] for r in members]
        ys = [r[metric] for r in members]
        style = "-" if key["corrected"] else ("--" if key["mitigated"] else ":")
        ax.loglog(ns, ys, style, marker="o", label=_series_label(key))
    ax.set_xlabel("channel uses N")
    ax.set_ylabel(metric.replace("_", " "))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(f"error mitigation, d = {rows[0]['d']}")
    _save(fig, out)


def render_surface(rows, out, metric="summed_mse"):
    n_uses = {r["n_uses"] for r in rows}
    if len(n_uses) != 1:
        raise SchemaError(f"surface needs one n_uses value, found {sorted(n_uses)}; add a filter")
    gammas = sorted({r["gamma"] for r in rows})
    kappas = sorted({r["kappa"] for r in rows})
    grid = np.full((len(kappas), len(gammas)), np.nan)
    for r in rows:
        grid[kappas.index(r["kappa"]), gammas.index(r["gamma"])] = r[metric]
    if np.isnan(grid).any():
        raise SchemaError("surface grid has holes; filter to a complete (gamma, kappa) grid")
    fig, ax = plt.subplots(figsize=(6.5, 5))
    mesh = ax.pcolormesh(gammas, kappas, np.log10(grid), shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=f"log10 {metric.replace('_', ' ')}")
    ax.set_xlabel("channel noisiness gamma")
    ax.set_ylabel("probe noise strength kappa")
    ax.set_title(f"d = {rows[0]['d']}, N = {rows[0]['n_uses']}")
    _save(fig, out)


def render_kvd(rows, out):
    by_d: dict[int, int] = {}
    for r in rows:
        by_d.setdefault(r["d"], r["K"])
    ds = np.array(sorted(by_d))
    ks = np.array([by_d[d] for d in ds])
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(ds, ks, zorder=3, label="found configurations K")
    ax.plot(ds, ds + 1, "--", color="green", label="d + 1")
    ax.plot(ds, 2.5 * ds, "--", color="darkgreen", label="2.5 d")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("measurement configurations K")
    ax.grid(True, alpha=0.3)
    ax.legend()
    _save(fig, out)


def render(spec: PlotSpec) -> str:
    """Render one figure; returns the output path."""
    rows = apply_filters(load_rows(spec.csv), spec.filters)
    if spec.kind == "scaling":
        render_scaling(rows, spec.out, spec.metric)
    elif spec.kind == "mitigation":
        render_mitigation(rows, spec.out, spec.metric)
    elif spec.kind == "surface":
        render_surface(rows, spec.out, spec.metric)
    else:
        render_kvd(rows, spec.out)
    return spec.out
