"""Discrete Weyl operator algebra on a d-dimensional space.

The d^2 unitaries W(n, m) are generated by the clock (phase) and shift
actions on the computational basis,

    W(n, m) = sum_k omega^{k n} |k><k + m mod d|,   omega = exp(2*pi*i/d),

indexed by pairs (n, m) in Z_d x Z_d or equivalently by the flat index
kbar = n + m*d.  Everything here is a pure function of its inputs;
returned arrays are frozen (non-writeable) so results can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Eigenvalues closer than this (as complex numbers) belong to the same
# eigenspace; distinct eigenvalues of a Weyl operator are separated by
# |omega - 1| ~ 2*pi/d, so the two scales never compete for sane d.
EIGENVALUE_CLUSTER_TOL = 1e-8

# An eigenvalue angle within this of 2*pi is really an angle ~0 that
# picked up rounding noise; wrap it back so "smallest argument" is stable.
_ANGLE_WRAP_TOL = 1e-6


@dataclass(frozen=True, order=True)
class WeylIndex:
    """Pair (n, m) in Z_d x Z_d identifying one Weyl operator."""

    n: int
    m: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if not (0 <= self.n < self.d and 0 <= self.m < self.d):
            raise ValueError(f"(n, m) = ({self.n}, {self.m}) out of range for d = {self.d}")

    @property
    def kbar(self) -> int:
        """Flat index n + m*d, a bijection with [0, d^2)."""
        return self.n + self.m * self.d

    @classmethod
    def from_flat(cls, kbar: int, d: int) -> "WeylIndex":
        if not 0 <= kbar < d * d:
            raise ValueError(f"flat index {kbar} out of range for d = {d}")
        return cls(kbar % d, kbar // d, d)

    def is_identity(self) -> bool:
        return self.n == 0 and self.m == 0


@dataclass(frozen=True)
class LabeledEigenbasis:
    """Orthonormal eigenbasis of a non-degenerate Weyl operator.

    Column i of ``vectors`` is the eigenvector labeled i; its eigenvalue is
    ``reference_eigenvalue * omega^i``.  Label 0 is the eigenvector whose
    eigenvalue has the smallest argument in [0, 2*pi).  Global phases of the
    eigenvectors are arbitrary; downstream quantities are probabilities and
    do not depend on them.
    """

    probe: WeylIndex
    vectors: np.ndarray
    reference_eigenvalue: complex

    def vector(self, label: int) -> np.ndarray:
        return self.vectors[:, label % self.probe.d]


@dataclass(frozen=True)
class Degenerate:
    """Outcome of eigensystem() when fewer than d distinct eigenvalues exist."""

    probe: WeylIndex
    distinct_count: int


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


@lru_cache(maxsize=4096)
def _weyl_matrix_cached(n: int, m: int, d: int) -> np.ndarray:
    k = np.arange(d)
    W = np.zeros((d, d), dtype=complex)
    W[k, (k + m) % d] = np.exp(2j * np.pi * k * n / d)
    W.flags.writeable = False
    return W


def weyl_matrix(idx: WeylIndex) -> np.ndarray:
    """The d x d unitary W(n, m); row k carries omega^{kn} in column (k+m) mod d."""
    return _weyl_matrix_cached(idx.n, idx.m, idx.d)


def commutation_phase(a: WeylIndex, b: WeylIndex) -> int:
    """Exponent t in W_b W_a = omega^t W_a W_b; zero iff the operators commute."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} != {b.d}")
    return (a.n * b.m - a.m * b.n) % a.d


def f_shift(kbar: int, probe: WeylIndex) -> int:
    """Label shift that W with flat index kbar induces on probe's eigenbasis.

    kbar decompresses to (a, b) with a = kbar mod d, b = kbar // d; the shift
    is (m*a - n*b) mod d for probe (n, m).  Zero iff the two operators commute.
    """
    d = probe.d
    if not 0 <= kbar < d * d:
        raise ValueError(f"flat index {kbar} out of range for d = {d}")
    a, b = kbar % d, kbar // d
    return (probe.m * a - probe.n * b) % d


def f_shift_table(probe: WeylIndex) -> np.ndarray:
    """f_shift for every flat index at once; shape (d^2,), values in [0, d)."""
    d = probe.d
    kbar = np.arange(d * d)
    table = (probe.m * (kbar % d) - probe.n * (kbar // d)) % d
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def _eigensystem_cached(n: int, m: int, d: int):
    idx = WeylIndex(n, m, d)
    vals, vecs = np.linalg.eig(weyl_matrix(idx))

    angles = np.mod(np.angle(vals), 2 * np.pi)
    angles[angles > 2 * np.pi - _ANGLE_WRAP_TOL] -= 2 * np.pi
    order = np.argsort(angles, kind="stable")

    clusters = [[order[0]]]
    for j in order[1:]:
        if abs(vals[j] - vals[clusters[-1][0]]) < EIGENVALUE_CLUSTER_TOL:
            clusters[-1].append(j)
        else:
            clusters.append([j])

    if len(clusters) < d:
        return Degenerate(probe=idx, distinct_count=len(clusters))

    # d distinct eigenvalues: one vector per cluster, labels follow the
    # angle order so cluster i holds eigenvalue reference * omega^i.
    cols = [c[0] for c in clusters]
    vectors = vecs[:, cols].copy()
    vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)
    vectors.flags.writeable = False
    return LabeledEigenbasis(
        probe=idx,
        vectors=vectors,
        reference_eigenvalue=complex(vals[cols[0]]),
    )


def eigensystem(idx: WeylIndex):
    """LabeledEigenbasis of W(n, m), or Degenerate when eigenvalues repeat.

    Degeneracy is decided numerically: eigenvalues are clustered with
    tolerance EIGENVALUE_CLUSTER_TOL and the cluster count is compared
    with d.  The identity (0, 0) is rejected outright.
    """
    if idx.is_identity():
        raise ValueError("the identity operator has no labeled eigenbasis")
    return _eigensystem_cached(idx.n, idx.m, idx.d)


def is_nondegenerate(idx: WeylIndex) -> bool:
    return isinstance(eigensystem(idx), LabeledEigenbasis)
