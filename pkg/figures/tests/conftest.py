import csv

import pytest

from weylest_figures.records import COLUMNS


def fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in COLUMNS])
    return path


def make_row(**overrides):
    row = {
        "d": 5, "K": 6, "gamma": 0.7, "kappa": 0.0, "n_uses": 1000,
        "estimator": "dpepc", "mitigated": False, "corrected": False,
        "trials": 200, "seed": 1, "summed_variance": 1e-3, "summed_mse": 1e-3,
        "mean_diamond": 0.1, "bias_norm": 0.01, "wall_time": 0.5,
    }
    row.update(overrides)
    return row


@pytest.fixture
def scaling_csv(tmp_path):
    rows = []
    for est, factor in (("dpepc", 6.0), ("ope", 1.0)):
        for kappa in (0.0, 0.5):
            for n in (10**3, 10**4, 10**5, 10**6):
                var = factor * 0.9 / n
                mse = var + (0.01 if kappa else 0.0)
                rows.append(make_row(estimator=est, kappa=kappa, n_uses=n,
                                     summed_variance=var, summed_mse=mse))
    return write_rows(tmp_path / "scaling.csv", rows)


@pytest.fixture
def mitigation_csv(tmp_path):
    rows = []
    for kappa in (0.0, 0.1, 0.9):
        variants = [(False, False)] if kappa == 0.0 else [(False, False), (True, False), (True, True)]
        for mitigated, corrected in variants:
            for n in (10**3, 10**4, 10**5, 10**6):
                mse = 2.0 / n if mitigated else (2.0 / n + kappa**2 * 0.05)
                if corrected:
                    mse *= 0.8
                rows.append(make_row(d=13, K=14, kappa=kappa, n_uses=n,
                                     mitigated=mitigated, corrected=corrected,
                                     summed_variance=2.0 / n, summed_mse=mse))
    return write_rows(tmp_path / "mitigation.csv", rows)


@pytest.fixture
def surface_csv(tmp_path):
    rows = []
    for gamma in (0.1, 0.5, 0.9):
        for kappa in (0.0, 0.3, 0.6, 0.9):
            mse = 1e-4 + kappa**2 * gamma * 0.1
            rows.append(make_row(d=7, K=8, gamma=gamma, kappa=kappa,
                                 n_uses=10**5, summed_mse=mse))
    return write_rows(tmp_path / "surface.csv", rows)


@pytest.fixture
def kvd_csv(tmp_path):
    rows = []
    for d in range(2, 31):
        k = d + 1 if d in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29) else min(2 * d, int(2.4 * d))
        rows.append(make_row(d=d, K=k, n_uses=200 * k, trials=2))
    return write_rows(tmp_path / "kvd.csv", rows)
