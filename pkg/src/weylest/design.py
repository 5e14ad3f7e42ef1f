"""Measurement-configuration search and the stacked binary design matrix.

A probe (n, m) with d distinct eigenvalues induces a d x d^2 binary block
A with A[j, kbar] = 1 iff f_shift(kbar; n, m) = j.  Stacking blocks for K
pairwise non-commuting probes gives the design matrix mapping channel
parameters to the K*d outcome probabilities; the configuration is
sufficient when that matrix has rank d^2 over the rationals.

Sufficiency is a hard combinatorial property, so rank is never decided by
a floating-point threshold: full rank is certified by exact elimination
modulo a large prime (a full-rank minor mod p is a nonzero integer minor),
and anything short of that certificate is settled by fraction-free integer
elimination with arbitrary-precision arithmetic.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .weyl import WeylIndex, f_shift_table, commutation_phase, is_nondegenerate

CACHE_FORMAT_VERSION = 1

# Certification prime for the fast exact-rank path (Mersenne, fits int64).
_RANK_PRIME = 2**31 - 1

# Guard for the int64 Bareiss fast path: |entry * pivot| must stay well
# below 2^63 or we redo the elimination with Python integers.
_INT64_SAFE = 2**31 - 1


class InsufficientConfigError(RuntimeError):
    """No sufficient configuration exists even using every non-degenerate operator."""


@dataclass(frozen=True)
class DesignBlock:
    """One probe's d x d^2 binary block of outcome-indicator rows."""

    probe: WeylIndex
    A: np.ndarray


def build_design_block(probe: WeylIndex) -> DesignBlock:
    if not is_nondegenerate(probe):
        raise ValueError(f"probe (n={probe.n}, m={probe.m}) is degenerate in d={probe.d}")
    d = probe.d
    A = np.zeros((d, d * d), dtype=np.int64)
    A[f_shift_table(probe), np.arange(d * d)] = 1
    A.flags.writeable = False
    return DesignBlock(probe=probe, A=A)


def _bareiss_rank_bigint(M: np.ndarray) -> int:
    """Fraction-free elimination with Python integers; exact, overflow-proof."""
    M = M.astype(object)
    rows, cols = M.shape
    r, prev = 0, 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        p = M[r, c]
        if r + 1 < rows:
            M[r + 1 :, c:] = (M[r + 1 :, c:] * p - np.outer(M[r + 1 :, c], M[r, c:])) // prev
        prev = p
        r += 1
        if r == rows:
            break
    return r


def exact_rank(M) -> int:
    """Rank over the rationals of an integer matrix, no tolerance anywhere.

    Bareiss fraction-free Gaussian elimination; runs in int64 while the
    intermediate minors are provably safe and transparently restarts with
    arbitrary-precision integers when they grow past that.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.size == 0:
        raise ValueError("expected a non-empty 2-D integer matrix")
    if not np.issubdtype(M.dtype, np.integer) and M.dtype != object:
        raise ValueError(f"expected integer entries, got dtype {M.dtype}")
    if M.dtype == object:
        return _bareiss_rank_bigint(M)

    W = M.astype(np.int64).copy()
    rows, cols = W.shape
    r, prev = 0, 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if W[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            W[[r, piv]] = W[[piv, r]]
        p = W[r, c]
        if r + 1 < rows:
            block = W[r + 1 :, c:]
            if block.size:
                # the update multiplies block entries by the pivot and pivot-row
                # entries by the pivot column, so bound all four
                worst = max(
                    int(np.abs(block).max()),
                    int(np.abs(W[r, c:]).max()),
                    abs(int(p)),
                    abs(prev),
                )
                if worst > _INT64_SAFE:
                    return _bareiss_rank_bigint(M)
                block[...] = (block * p - np.outer(W[r + 1 :, c], W[r, c:])) // prev
        prev = p
        r += 1
        if r == rows:
            break
    return r


def _rank_mod_prime(M: np.ndarray, p: int = _RANK_PRIME) -> int:
    """Row reduction over F_p with int64 arithmetic; exact, certifies lower bounds."""
    W = (np.asarray(M, dtype=np.int64) % p).copy()
    rows, cols = W.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if W[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            W[[r, piv]] = W[[piv, r]]
        inv = pow(int(W[r, c]), p - 2, p)
        W[r, c:] = (W[r, c:] * inv) % p
        col = W[r + 1 :, c]
        hit = col != 0
        if hit.any():
            W[r + 1 :, c:][hit] = (W[r + 1 :, c:][hit] - np.outer(col[hit], W[r, c:])) % p
        r += 1
        if r == rows:
            break
    return r


def certified_rank(M: np.ndarray) -> int:
    """Exact rational rank: prime-field certificate when full, Bareiss otherwise.

    rank over F_p never exceeds the rational rank, so a full-rank result mod p
    is already a proof; only the (rare) deficient answer needs the slower
    arbitrary-precision elimination to rule out an unlucky prime.
    """
    M = np.asarray(M)
    full = min(M.shape)
    r = _rank_mod_prime(M)
    if r == full:
        return r
    return exact_rank(M)


def nondegenerate_set(d: int) -> list[WeylIndex]:
    """All non-identity Weyl indices with d distinct eigenvalues, ascending kbar."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return [
        idx
        for kbar in range(1, d * d)
        if is_nondegenerate(idx := WeylIndex.from_flat(kbar, d))
    ]


def commuting_cover(ops: list[WeylIndex]) -> list[list[WeylIndex]]:
    """Greedy first-fit cover of ops by mutually commuting subsets.

    Operators are scanned in ascending kbar order; each goes into the first
    subset whose every member commutes with it, else it opens a new subset.
    Deterministic; the subsets partition the input.
    """
    if not ops:
        raise ValueError("ops must be non-empty")
    subsets: list[list[WeylIndex]] = []
    for op in sorted(ops, key=lambda w: w.kbar):
        for s in subsets:
            if all(commutation_phase(op, member) == 0 for member in s):
                s.append(op)
                break
        else:
            subsets.append([op])
    return subsets


def precompute_B(A: np.ndarray) -> np.ndarray:
    """Least-squares estimator matrix (A^T A)^{-1} A^T for full-column-rank A."""
    Af = np.asarray(A, dtype=float)
    try:
        B = np.linalg.solve(Af.T @ Af, Af.T)
    except np.linalg.LinAlgError as exc:
        raise ValueError("design matrix is rank deficient") from exc
    n = Af.shape[1]
    residual = float(np.max(np.abs(B @ Af - np.eye(n))))
    if residual > 1e-9:
        raise ValueError(f"design matrix is rank deficient (B A deviates from I by {residual:.2e})")
    return B


@dataclass(frozen=True)
class MeasurementConfig:
    """A sufficient set of probes with its design matrix and estimator matrix."""

    d: int
    probes: tuple[WeylIndex, ...]
    A: np.ndarray
    rank: int
    B: np.ndarray

    @property
    def K(self) -> int:
        return len(self.probes)

    def to_record(self) -> dict:
        return {
            "format_version": CACHE_FORMAT_VERSION,
            "d": self.d,
            "K": self.K,
            "probes": [p.kbar for p in self.probes],
            "B": self.B.tolist(),
        }

    @classmethod
    def from_record(cls, record: dict) -> "MeasurementConfig":
        version = record.get("format_version")
        if version != CACHE_FORMAT_VERSION:
            raise ValueError(f"unsupported config record version {version!r}")
        d = record["d"]
        probes = tuple(WeylIndex.from_flat(k, d) for k in record["probes"])
        if len(probes) != record["K"]:
            raise ValueError("config record K does not match its probe list")
        A = _stack_blocks(probes)
        B = np.asarray(record["B"], dtype=float)
        if B.shape != (d * d, len(probes) * d):
            raise ValueError(f"config record B has wrong shape {B.shape}")
        B.flags.writeable = False
        return cls(d=d, probes=probes, A=A, rank=d * d, B=B)


def _stack_blocks(probes) -> np.ndarray:
    A = np.vstack([build_design_block(p).A for p in probes])
    A.flags.writeable = False
    return A


def _cache_path(cache_dir, d: int) -> Path:
    return Path(cache_dir) / f"config_d{d}.json"


def default_cache_dir() -> Path:
    return Path(os.environ.get("WEYLEST_CACHE", Path.home() / ".cache" / "weylest"))


def find_config(d: int, cache_dir=None) -> MeasurementConfig:
    """Find (or load) a sufficient measurement configuration for dimension d.

    One representative per commuting subset of the non-degenerate operators,
    dropping representatives that commute with an earlier one (they would
    only duplicate rows).  If the stacked matrix falls short of rank d^2 the
    remaining non-degenerate operators are appended greedily by exact rank
    gain.  The result is cached on disk keyed by d so later runs skip both
    the search and the pseudo-inverse.
    """
    if cache_dir is not None:
        path = _cache_path(cache_dir, d)
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                return MeasurementConfig.from_record(json.load(fh))

    ops = nondegenerate_set(d)
    subsets = commuting_cover(ops)
    probes: list[WeylIndex] = []
    for s in subsets:
        rep = s[0]
        if all(commutation_phase(rep, q) != 0 for q in probes):
            probes.append(rep)

    A = _stack_blocks(probes)
    rank = certified_rank(A)
    target = d * d

    if rank < target:
        chosen = set(probes)
        membership = {op: i for i, s in enumerate(subsets) for op in s}
        used = [0] * len(subsets)
        for probe in probes:
            used[membership[probe]] += 1
        while rank < target:
            pool = sorted(
                (op for op in ops if op not in chosen),
                key=lambda op: (used[membership[op]], op.kbar),
            )
            if not pool:
                raise InsufficientConfigError(
                    f"rank {rank} < {target} even with all {len(ops)} non-degenerate operators"
                )
            best, best_rank = None, rank
            for op in pool:
                cand = certified_rank(np.vstack([A, build_design_block(op).A]))
                if cand > best_rank:
                    best, best_rank = op, cand
                    if cand == target:
                        break
            if best is None:
                raise InsufficientConfigError(
                    f"rank stalled at {rank} < {target}; no operator adds independent rows"
                )
            probes.append(best)
            chosen.add(best)
            used[membership[best]] += 1
            A = _stack_blocks(probes)
            rank = best_rank

    cfg = MeasurementConfig(d=d, probes=tuple(probes), A=A, rank=rank, B=precompute_B(A))

    if cache_dir is not None:
        path = _cache_path(cache_dir, d)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(cfg.to_record(), fh)
        tmp.replace(path)

    return cfg
