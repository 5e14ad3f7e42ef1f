"""Reading and filtering the results-CSV interchange format.

The only input this package understands is the documented CSV: a mandatory
header row with the columns below, one row per (grid point, estimator,
mitigation variant).  Nothing here imports the estimation package; the CSV
is the entire contract.
"""

from __future__ import annotations

import csv
from pathlib import Path

COLUMNS = (
    "d", "K", "gamma", "kappa", "n_uses", "estimator", "mitigated", "corrected",
    "trials", "seed", "summed_variance", "summed_mse", "mean_diamond",
    "bias_norm", "wall_time",
)

_INT_COLUMNS = {"d", "K", "n_uses", "trials", "seed"}
_BOOL_COLUMNS = {"mitigated", "corrected"}
_STR_COLUMNS = {"estimator"}

METRIC_COLUMNS = ("summed_variance", "summed_mse", "mean_diamond", "bias_norm")


class SchemaError(ValueError):
    """Input file does not conform to the results-CSV schema."""


def _parse(column: str, text: str):
    if column in _STR_COLUMNS:
        return text
    if column in _BOOL_COLUMNS:
        if text not in ("true", "false"):
            raise SchemaError(f"column {column!r}: expected true/false, got {text!r}")
        return text == "true"
    if column in _INT_COLUMNS:
        return int(text)
    return float(text)


def load_rows(paths) -> list[dict]:
    """Rows from one or more results CSVs as typed dicts."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    rows: list[dict] = []
    for path in paths:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != COLUMNS:
                raise SchemaError(f"{path}: header does not match the results schema")
            for line in reader:
                if not line:
                    continue
                if len(line) != len(COLUMNS):
                    raise SchemaError(f"{path}: row has {len(line)} fields, expected {len(COLUMNS)}")
                rows.append({c: _parse(c, cell) for c, cell in zip(COLUMNS, line)})
    if not rows:
        raise SchemaError("no data rows in input")
    return rows


def coerce_filter_value(column: str, value):
    """Normalize a filter value (possibly a string from the CLI) to the column type."""
    if column not in COLUMNS:
        raise SchemaError(f"unknown filter column {column!r}")
    if isinstance(value, str):
        return _parse(column, value)
    if column in _BOOL_COLUMNS:
        return bool(value)
    if column in _INT_COLUMNS:
        return int(value)
    if column in _STR_COLUMNS:
        return str(value)
    return float(value)


def apply_filters(rows: list[dict], filters: dict) -> list[dict]:
    """Keep rows matching every predicate; a list value means set membership."""
    kept = rows
    for column, wanted in (filters or {}).items():
        if isinstance(wanted, (list, tuple)):
            allowed = {coerce_filter_value(column, v) for v in wanted}
        else:
            allowed = {coerce_filter_value(column, wanted)}
        kept = [r for r in kept if r[column] in allowed]
    if not kept:
        raise SchemaError(f"no rows left after filters {filters!r}")
    return kept
