"""Orthogonal matrices that fix the diagonal direction ``n* = (1, ..., 1) / sqrt(d)``."""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegeneratePurityError,
    InvalidPermutationError,
    InvalidShapeError,
)

ORTHO_TOL = 1e-10


def diagonal_axis(d):
    return np.full(d, 1.0 / np.sqrt(d))


def orthogonality_residual(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a @ a.T - np.eye(a.shape[0]))))


def axis_residual(a):
    a = np.asarray(a)
    n = diagonal_axis(a.shape[0])
    return float(max(np.max(np.abs(a @ n - n)), np.max(np.abs(a.T @ n - n))))


@dataclass(frozen=True, eq=False)
class QMatrix:
    """Circulant orthogonal matrix ``Q[n, j] = q * mu[(n - j) % d] + 1/d``."""

    d: int
    entries: np.ndarray
    q_factor: float

    @property
    def T(self):
        return self.entries.T


@dataclass(frozen=True, eq=False)
class RotationFixingDiagonal:
    d: int
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.shape != (self.d, self.d):
            raise InvalidShapeError(f"expected {self.d}x{self.d} matrix, got {a.shape}")
        if orthogonality_residual(a) > ORTHO_TOL or axis_residual(a) > ORTHO_TOL:
            raise ValueError("matrix is not orthogonal with n* as a fixed axis")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def trace(self):
        return float(np.trace(self.entries))

    def __matmul__(self, other):
        other = other.entries if isinstance(other, RotationFixingDiagonal) else other
        return RotationFixingDiagonal(self.d, self.entries @ other)

    @classmethod
    def identity(cls, d):
        return cls(d, np.eye(d))


def q_matrix(s):
    d = s.d
    excess = s.kappa - 1.0 / d
    if excess <= 1e-14:
        raise DegeneratePurityError("q is undefined at kappa = 1/d")
    q = np.sqrt((1.0 - 1.0 / d) / excess)
    idx = np.arange(d)
    # Q[n, j] = q * mu[(n + d - j) % d] + 1/d
    entries = q * np.asarray(s.mu)[(idx[:, None] - idx[None, :]) % d] + 1.0 / d
    entries.setflags(write=False)
    return QMatrix(d, entries, float(q))


def rotation_d3(theta):
    """Rotation of R^3 by ``theta`` about ``n*`` (Rodrigues form)."""
    n = diagonal_axis(3)
    c, s = np.cos(theta), np.sin(theta)
    cross = np.array([[0.0, n[2], -n[1]], [-n[2], 0.0, n[0]], [n[1], -n[0], 0.0]])
    # cross[i, j] = sum_k eps_ijk n_k
    r = np.outer(n, n) * (1.0 - c) + np.eye(3) * c - cross * s
    return RotationFixingDiagonal(3, r)


def permutation_rotation(d, mapping):
    """Permutation matrix with ``P[r, mapping[r]] = 1``."""
    mapping = [int(x) for x in mapping]
    if len(mapping) != d or sorted(mapping) != list(range(d)):
        raise InvalidPermutationError(f"{mapping} is not a permutation of 0..{d - 1}")
    p = np.zeros((d, d))
    p[np.arange(d), mapping] = 1.0
    return RotationFixingDiagonal(d, p)


def anticyclic_permutation(d):
    """``r -> (d - r) mod d``."""
    return permutation_rotation(d, [(-r) % d for r in range(d)])


def _entries(x):
    return x.entries if hasattr(x, "entries") else np.asarray(x)


def conjugate_rotation(q, o):
    """``Q^T O Q``."""
    qe, oe = _entries(q), _entries(o)
    if qe.shape != oe.shape:
        raise InvalidShapeError(f"dimension mismatch: Q {qe.shape} vs O {oe.shape}")
    return RotationFixingDiagonal(qe.shape[0], qe.T @ oe @ qe)


def unconjugate_rotation(q, o_tilde):
    """Inverse of :func:`conjugate_rotation`: ``Q O~ Q^T``."""
    qe, oe = _entries(q), _entries(o_tilde)
    if qe.shape != oe.shape:
        raise InvalidShapeError(f"dimension mismatch: Q {qe.shape} vs O {oe.shape}")
    return RotationFixingDiagonal(qe.shape[0], qe @ oe @ qe.T)
