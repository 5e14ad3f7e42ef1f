"""Discrete Weyl channel parameter vectors, channel action, and generators.

A channel is the probabilistic mixture rho -> sum_kbar p[kbar] W rho W^dag
over all d^2 Weyl conjugations; the length-d^2 probability vector p (flat
kbar order) fully determines it and is the estimation target throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .weyl import WeylIndex, weyl_matrix, f_shift_table, is_nondegenerate

PROBABILITY_TOL = 1e-12
RECORD_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ChannelParams:
    """Probability vector of length d^2 over flat Weyl indices."""

    d: int
    p: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (self.d * self.d,):
            raise ValueError(f"expected {self.d * self.d} parameters, got shape {p.shape}")
        if p.min() < -PROBABILITY_TOL:
            raise ValueError(f"negative channel parameter {p.min():.3e}")
        if abs(p.sum() - 1.0) > PROBABILITY_TOL:
            raise ValueError(f"channel parameters sum to {p.sum()!r}, not 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    def to_record(self) -> dict:
        rec = {"format_version": RECORD_FORMAT_VERSION, "d": self.d, "p": self.p.tolist()}
        if self.meta:
            rec["meta"] = dict(self.meta)
        return rec

    @classmethod
    def from_record(cls, record: dict) -> "ChannelParams":
        version = record.get("format_version")
        if version != RECORD_FORMAT_VERSION:
            raise ValueError(f"unsupported channel record version {version!r}")
        return cls(d=record["d"], p=np.asarray(record["p"], dtype=float),
                   meta=dict(record.get("meta", {})))


def identity_channel(d: int) -> ChannelParams:
    p = np.zeros(d * d)
    p[0] = 1.0
    return ChannelParams(d=d, p=p, meta={"kind": "identity"})


def make_depolarizing(d: int, kappa: float) -> ChannelParams:
    """Mixture of identity with the uniform Weyl mixture; kappa=1 fully depolarizes."""
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    p = np.full(d * d, kappa / (d * d))
    p[0] += 1.0 - kappa
    return ChannelParams(d=d, p=p, meta={"kind": "depolarizing", "kappa": kappa})


def make_exp_corr_channel(d: int, gamma: float) -> ChannelParams:
    """Channel parameters from the spectrum of the exponential correlation matrix.

    Builds the d^2 x d^2 matrix (1/d^2) * gamma^{|i-j|}, whose trace is 1, and
    assigns its eigenvalues in descending order to kbar = 0, 1, ...; gamma=1
    yields the noiseless channel and gamma=0 the completely depolarizing one.
    Eigenvalues are computed numerically; round-off negatives (the matrix is
    PSD analytically) are clamped and the vector renormalized.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    n = d * d
    idx = np.arange(n)
    phi = gamma ** np.abs(idx[:, None] - idx[None, :]) / n
    vals = np.linalg.eigvalsh(phi)[::-1]
    if vals.min() < -1e-12:
        raise ValueError(f"correlation matrix eigenvalue {vals.min():.3e} below round-off floor")
    vals = np.clip(vals, 0.0, None)
    return ChannelParams(d=d, p=vals / vals.sum(), meta={"kind": "exp_corr", "gamma": gamma})


def transition_probs(ch: ChannelParams, probe: WeylIndex) -> np.ndarray:
    """Shift probabilities of the classical symmetric channel induced on probe's eigenbasis.

    lambda[l] collects the channel parameters of every Weyl operator that
    shifts probe's eigenbasis labels by l.
    """
    if probe.d != ch.d:
        raise ValueError(f"dimension mismatch: probe d={probe.d}, channel d={ch.d}")
    if not is_nondegenerate(probe):
        raise ValueError(f"probe (n={probe.n}, m={probe.m}) is degenerate in d={probe.d}")
    lam = np.bincount(f_shift_table(probe), weights=ch.p, minlength=ch.d)
    lam.flags.writeable = False
    return lam


def apply_channel(ch: ChannelParams, rho: np.ndarray) -> np.ndarray:
    """Kraus-sum action sum_kbar p[kbar] W rho W^dag on a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    d = ch.d
    if rho.shape != (d, d):
        raise ValueError(f"expected a {d} x {d} density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValueError(f"density matrix trace {np.trace(rho)!r} is not 1")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("density matrix is not positive semdefinite")

    out = np.zeros_like(rho)
    for kbar in np.flatnonzero(ch.p):
        W = weyl_matrix(WeylIndex.from_flat(int(kbar), d))
        out += ch.p[kbar] * (W @ rho @ W.conj().T)
    return out


def compose(ch1: ChannelParams, ch2: ChannelParams) -> ChannelParams:
    """Parameters of the serial concatenation: group convolution over Z_d x Z_d.

    Commutative, because the conjugation phases cancel in W a W^dag.
    """
    if ch1.d != ch2.d:
        raise ValueError(f"dimension mismatch: {ch1.d} != {ch2.d}")
    d = ch1.d
    # kbar = n + m*d, so Fortran order gives grid[n, m].
    p1 = ch1.p.reshape((d, d), order="F")
    p2 = ch2.p.reshape((d, d), order="F")
    out = np.zeros((d, d))
    for a in range(d):
        for b in range(d):
            w = p1[a, b]
            if w:
                out += w * np.roll(p2, (a, b), axis=(0, 1))
    return ChannelParams(d=d, p=out.reshape(-1, order="F"))


def transition_matrix(lam: np.ndarray) -> np.ndarray:
    """Circulant doubly stochastic matrix with entry (j, i) = lam[(j - i) mod d]."""
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1:
        raise ValueError("expected a 1-D probability vector")
    if lam.min() < -PROBABILITY_TOL or abs(lam.sum() - 1.0) > PROBABILITY_TOL:
        raise ValueError("transition probabilities must form a probability vector")
    M = scipy.linalg.circulant(lam)
    M.flags.writeable = False
    return M
