"""Accuracy metrics aggregated over Monte Carlo trials."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelParams
from .estimate import Estimate


@dataclass(frozen=True)
class TrialBatch:
    """Estimates of one truth channel from repeated runs of one pipeline."""

    truth: ChannelParams
    estimates: list[Estimate]

    def __post_init__(self):
        if not self.estimates:
            raise ValueError("batch needs at least one estimate")
        first = self.estimates[0]
        for est in self.estimates:
            if (est.d, est.estimator, est.mitigated, est.corrected) != (
                first.d,
                first.estimator,
                first.mitigated,
                first.corrected,
            ):
                raise ValueError("batch mixes estimates from different pipelines")
        if first.d != self.truth.d:
            raise ValueError(f"estimate d={first.d} does not match truth d={self.truth.d}")

    @property
    def matrix(self) -> np.ndarray:
        """Trials-by-parameters array of the estimates."""
        return np.stack([est.x for est in self.estimates])


def summed_variance(batch: TrialBatch) -> float:
    """Unbiased sample variance across trials, summed over all parameters."""
    if len(batch.estimates) < 2:
        raise ValueError("variance needs at least two trials")
    return float(np.var(batch.matrix, axis=0, ddof=1).sum())


def summed_mse(batch: TrialBatch) -> float:
    """Mean squared error against the truth, summed over all parameters."""
    return float(((batch.matrix - batch.truth.p) ** 2).mean(axis=0).sum())


def bias_vector(batch: TrialBatch) -> np.ndarray:
    return batch.matrix.mean(axis=0) - batch.truth.p


def bias_norm(batch: TrialBatch) -> float:
    return float(np.linalg.norm(bias_vector(batch)))


def diamond_distance(p, q) -> float:
    """Channel distinguishability of two Weyl channels: the l1 parameter distance."""
    pv = p.p if isinstance(p, ChannelParams) else np.asarray(p, dtype=float)
    qv = q.p if isinstance(q, ChannelParams) else np.asarray(q, dtype=float)
    if pv.shape != qv.shape:
        raise ValueError(f"dimension mismatch: {pv.shape} vs {qv.shape}")
    return float(np.abs(pv - qv).sum())


def mean_diamond(batch: TrialBatch) -> float:
    return float(np.mean([diamond_distance(est.x, batch.truth.p) for est in batch.estimates]))


def loglog_slope(points) -> float:
    """Least-squares slope of log(metric) against log(N)."""
    pts = sorted(points)
    if len(pts) < 3:
        raise ValueError("need at least three points")
    ns = np.array([n for n, _ in pts], dtype=float)
    ys = np.array([y for _, y in pts], dtype=float)
    if np.any(np.diff(ns) <= 0):
        raise ValueError("N values must be strictly increasing")
    if np.any(ys <= 0):
        raise ValueError("metric values must be positive on a log scale")
    return float(np.polyfit(np.log(ns), np.log(ys), 1)[0])
