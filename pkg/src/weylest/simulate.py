"""Stochastic simulation of both estimation protocols.

The fast path never touches state vectors: for probe eigenstates of a Weyl
operator, measurement statistics are exactly multinomial draws from the
induced classical channel, and the entangled-probe protocol's joint
measurement outcomes are distributed exactly as the channel parameters
themselves.  A density-matrix path with Born-rule sampling exists as an
independent cross-check for d <= 16.

Unintended probe noise is modeled as a depolarizing channel acting on the
channel-input qudit before the channel under study; Weyl channels commute,
so this placement is equivalent to noise anywhere before measurement.  For
the entangled protocol the same single-qudit placement is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelParams, apply_channel, compose, make_depolarizing, transition_probs
from .design import MeasurementConfig
from .weyl import WeylIndex, eigensystem

ORACLE_DIMENSION_CAP = 16


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by (master_seed, stream_id).

    The same key yields the same samples on any thread schedule; stream ids
    are tuples so callers can key by (grid point, estimator, trial) and such.
    """

    master_seed: int
    stream_id: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.PCG64(seq))


def rng_stream(master_seed: int, *stream_id: int) -> np.random.Generator:
    return RngStream(master_seed, tuple(stream_id)).generator()


@dataclass(frozen=True)
class CountVector:
    """Measurement outcome counts for one configuration; probe None marks the entangled protocol."""

    probe: WeylIndex | None
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.min(initial=0) < 0 or counts.sum() != self.shots:
            raise ValueError(f"counts must be non-negative and sum to shots={self.shots}")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def _noisy(ch: ChannelParams, kappa: float) -> ChannelParams:
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    if kappa == 0.0:
        return ch
    return compose(ch, make_depolarizing(ch.d, kappa))


def _multinomial(rng: np.random.Generator, shots: int, probs: np.ndarray) -> np.ndarray:
    return rng.multinomial(shots, probs / probs.sum())


def simulate_dpepc(
    ch: ChannelParams,
    cfg: MeasurementConfig,
    n_uses: int,
    kappa: float,
    rng: np.random.Generator,
) -> list[CountVector]:
    """floor(N/K) shots per probe, sampled from the induced classical channels."""
    if cfg.d != ch.d:
        raise ValueError(f"dimension mismatch: config d={cfg.d}, channel d={ch.d}")
    if n_uses < cfg.K:
        raise ValueError(f"need at least K={cfg.K} channel uses, got {n_uses}")
    shots = n_uses // cfg.K
    noisy = _noisy(ch, kappa)
    return [
        CountVector(probe, _multinomial(rng, shots, transition_probs(noisy, probe)), shots)
        for probe in cfg.probes
    ]


def simulate_dpepc_oracle(
    ch: ChannelParams,
    cfg: MeasurementConfig,
    n_uses: int,
    kappa: float,
    rng: np.random.Generator,
) -> list[CountVector]:
    """Same contract as simulate_dpepc via explicit density-matrix evolution.

    Prepares the label-0 eigenstate, pushes it through the depolarizing noise
    and the channel as Kraus sums, and samples Born-rule probabilities in the
    probe eigenbasis.  Costs O(d^4) per configuration, hence the dimension cap.
    """
    if cfg.d > ORACLE_DIMENSION_CAP:
        raise ValueError(f"oracle path capped at d={ORACLE_DIMENSION_CAP}, got d={cfg.d}")
    if n_uses < cfg.K:
        raise ValueError(f"need at least K={cfg.K} channel uses, got {n_uses}")
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    shots = n_uses // cfg.K
    noise = make_depolarizing(ch.d, kappa)
    out = []
    for probe in cfg.probes:
        basis = eigensystem(probe)
        psi = basis.vectors[:, 0]
        rho = np.outer(psi, psi.conj())
        rho = apply_channel(ch, apply_channel(noise, rho))
        probs = np.einsum("ij,jk,ki->i", basis.vectors.conj().T, rho, basis.vectors).real
        out.append(CountVector(probe, _multinomial(rng, shots, np.clip(probs, 0.0, None)), shots))
    return out


def simulate_ope(
    ch: ChannelParams,
    n_uses: int,
    kappa: float,
    rng: np.random.Generator,
) -> CountVector:
    """N joint-measurement outcomes over d^2 cells, distributed as the channel parameters."""
    if n_uses < 1:
        raise ValueError(f"need at least one channel use, got {n_uses}")
    noisy = _noisy(ch, kappa)
    return CountVector(None, _multinomial(rng, n_uses, noisy.p), n_uses)
