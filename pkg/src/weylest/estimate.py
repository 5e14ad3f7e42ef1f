"""Estimators, measurement-error mitigation, and simplex correction.

The least-squares estimate is the precomputed estimator matrix applied to
stacked outcome frequencies; it can carry negative entries and is kept
that way in the raw Estimate.  Mitigation of known depolarizing probe
noise has a closed form on the final estimate; the general path inverts
the per-block stochastic confusion matrix instead.  Projection onto the
probability simplex (clamp negatives, renormalize) is a separate, flagged
step so both variants can be compared.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .design import MeasurementConfig
from .simulate import CountVector

DEFAULT_CONDITION_CAP = 1e8
_SINGULAR_CONDITION = 1e15


class SingularMatrixError(np.linalg.LinAlgError):
    """Confusion matrix is not invertible (e.g. fully depolarizing noise)."""


class IllConditionedError(np.linalg.LinAlgError):
    """Confusion matrix inversion would amplify noise past the configured cap."""


@dataclass(frozen=True)
class Estimate:
    """Estimated channel parameters plus the pipeline that produced them."""

    d: int
    x: np.ndarray
    estimator: str
    mitigated: bool = False
    corrected: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.shape != (self.d * self.d,):
            raise ValueError(f"expected {self.d * self.d} entries, got shape {x.shape}")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    def to_record(self) -> dict:
        return {
            "format_version": 1,
            "d": self.d,
            "x": self.x.tolist(),
            "estimator": self.estimator,
            "mitigated": self.mitigated,
            "corrected": self.corrected,
            "meta": dict(self.meta),
        }

    @classmethod
    def from_record(cls, record: dict) -> "Estimate":
        if record.get("format_version") != 1:
            raise ValueError(f"unsupported estimate record version {record.get('format_version')!r}")
        return cls(
            d=record["d"],
            x=np.asarray(record["x"], dtype=float),
            estimator=record["estimator"],
            mitigated=record["mitigated"],
            corrected=record["corrected"],
            meta=dict(record.get("meta", {})),
        )


def dpepc_estimate(counts: list[CountVector], cfg: MeasurementConfig) -> Estimate:
    """Least squares on the stacked relative frequencies: x = B b.

    The counts must be aligned with the configuration's probe order.  The
    output need not sum to one and may contain negatives; see
    correct_to_simplex for the projection step.
    """
    if len(counts) != cfg.K:
        raise ValueError(f"expected {cfg.K} count vectors, got {len(counts)}")
    for cv, probe in zip(counts, cfg.probes):
        if cv.probe != probe:
            raise ValueError(f"count vector for {cv.probe} misaligned with probe {probe}")
        if cv.shots <= 0:
            raise ValueError("every count vector needs at least one shot")
    b = np.concatenate([cv.frequencies for cv in counts])
    return Estimate(d=cfg.d, x=cfg.B @ b, estimator="dpepc")


def ope_estimate(counts: CountVector) -> Estimate:
    """Maximum-likelihood frequencies of the joint-measurement outcomes."""
    if counts.probe is not None:
        raise ValueError("expected joint-measurement counts (probe marker None)")
    if counts.shots <= 0:
        raise ValueError("need at least one shot")
    x = counts.frequencies
    d = int(round(np.sqrt(x.size)))
    if d * d != x.size:
        raise ValueError(f"count vector length {x.size} is not a square")
    return Estimate(d=d, x=x, estimator="ope")


def mitigate_depolarizing(est: Estimate, kappa: float) -> Estimate:
    """Invert known depolarizing probe noise in closed form.

    x -> (x - kappa/d^2) / (1 - kappa), the exact inverse of mixing with the
    uniform vector; kappa = 1 destroys all information and is rejected.
    """
    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"kappa must lie in [0, 1), got {kappa}")
    x = (est.x - kappa / (est.d * est.d)) / (1.0 - kappa)
    meta = dict(est.meta, kappa_assumed=kappa, mitigation="depolarizing")
    return replace(est, x=x, mitigated=True, meta=meta)


def mitigate_general(
    beta: np.ndarray,
    lam_matrix: np.ndarray,
    gamma_matrix: np.ndarray | None = None,
    condition_cap: float = DEFAULT_CONDITION_CAP,
) -> np.ndarray:
    """Recover ideal outcome probabilities from noisy ones by matrix inversion.

    beta are the recorded frequencies, lam_matrix the doubly stochastic
    matrix of the Weyl-noise-induced classical channel, and gamma_matrix an
    optional left-stochastic readout confusion matrix applied on top.
    """
    beta = np.asarray(beta, dtype=float)
    M = np.asarray(lam_matrix, dtype=float)
    if gamma_matrix is not None:
        M = np.asarray(gamma_matrix, dtype=float) @ M
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != beta.size:
        raise ValueError(f"confusion matrix shape {M.shape} does not match {beta.size} outcomes")
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > _SINGULAR_CONDITION:
        raise SingularMatrixError(f"confusion matrix is singular (cond={cond:.2e})")
    if cond > condition_cap:
        raise IllConditionedError(f"condition number {cond:.2e} exceeds cap {condition_cap:.2e}")
    return np.linalg.solve(M, beta)


def dpepc_estimate_block_mitigated(
    counts: list[CountVector],
    cfg: MeasurementConfig,
    kappa: float,
    condition_cap: float = DEFAULT_CONDITION_CAP,
) -> Estimate:
    """Least squares on per-block frequencies mitigated through the confusion matrix.

    Depolarizing noise induces the same circulant confusion matrix
    (1-kappa) I + (kappa/d) J on every probe eigenbasis; each block's
    frequencies are pushed through its inverse before the usual x = B b.
    Agrees with mitigate_depolarizing in expectation.
    """
    from .channels import make_depolarizing, transition_matrix, transition_probs

    if not 0.0 <= kappa < 1.0:
        raise ValueError(f"kappa must lie in [0, 1), got {kappa}")
    if len(counts) != cfg.K:
        raise ValueError(f"expected {cfg.K} count vectors, got {len(counts)}")
    noise = make_depolarizing(cfg.d, kappa)
    blocks = []
    for cv, probe in zip(counts, cfg.probes):
        if cv.probe != probe:
            raise ValueError(f"count vector for {cv.probe} misaligned with probe {probe}")
        lam = transition_matrix(transition_probs(noise, probe))
        blocks.append(mitigate_general(cv.frequencies, lam, condition_cap=condition_cap))
    x = cfg.B @ np.concatenate(blocks)
    return Estimate(
        d=cfg.d,
        x=x,
        estimator="dpepc",
        mitigated=True,
        meta={"kappa_assumed": kappa, "mitigation": "blocks"},
    )


def correct_to_simplex(x: np.ndarray) -> np.ndarray:
    """Clamp negatives to zero and renormalize; already-valid vectors pass through.

    Idempotent.  If nothing positive survives, returns the uniform vector and
    warns, since the direction of the input carries no usable information.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("estimate contains non-finite entries")
    if x.min() >= 0.0 and abs(x.sum() - 1.0) <= 1e-12:
        return x + 0.0  # copy; + 0.0 also normalizes any -0.0 entries
    clipped = np.clip(x, 0.0, None)
    total = clipped.sum()
    if total <= 0.0:
        warnings.warn("no positive entries to keep; falling back to the uniform vector")
        return np.full_like(x, 1.0 / x.size)
    return clipped / total


def correct_estimate(est: Estimate) -> Estimate:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        x = correct_to_simplex(est.x)
    meta = dict(est.meta)
    if caught:
        meta["correction_degenerate"] = True
    return replace(est, x=x, corrected=True, meta=meta)
