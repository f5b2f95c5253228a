"""Core data model: time series, triangular arrays, increment and delta operators.

A time series is a finite sequence of vectors in R^d indexed 0..N.  A
triangular array assigns a value (scalar, vector or matrix) to every ordered
index pair (k, l) with 0 <= k < l <= N.  The delta operator

    delta Xi[k,l,m] = Xi[k,m] - Xi[k,l] - Xi[l,m]

measures the failure of additivity of a triangular array; it vanishes
identically on increment arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "NormChoice",
    "TimeSeries",
    "TriangularArray",
    "increments",
    "delta",
]


class NormChoice(Enum):
    """Vector norm used throughout; matrix entries are flattened first."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    def of(self, v: np.ndarray) -> float:
        """Norm of a single value (any shape; flattened)."""
        flat = np.asarray(v, dtype=float).ravel()
        if self is NormChoice.L1:
            return float(np.sum(np.abs(flat)))
        if self is NormChoice.L2:
            return float(np.sqrt(np.sum(flat * flat)))
        return float(np.max(np.abs(flat))) if flat.size else 0.0

    def of_axis(self, v: np.ndarray, start_axis: int) -> np.ndarray:
        """Norms of a batch of values; axes >= start_axis are flattened."""
        v = np.asarray(v, dtype=float)
        flat = v.reshape(v.shape[:start_axis] + (-1,))
        if self is NormChoice.L1:
            return np.sum(np.abs(flat), axis=-1)
        if self is NormChoice.L2:
            return np.sqrt(np.sum(flat * flat, axis=-1))
        return np.max(np.abs(flat), axis=-1)


@dataclass(frozen=True)
class TimeSeries:
    """A sequence of N+1 points in R^d, stored as an (N+1, d) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("points must be a non-empty (N+1, d) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def horizon(self) -> int:
        return self.points.shape[0] - 1

    def restrict(self, k: int, l: int) -> "TimeSeries":
        """Sub-series (w_k, ..., w_l)."""
        if not 0 <= k <= l <= self.horizon:
            raise IndexError(f"invalid interval [{k},{l}]")
        return TimeSeries(self.points[k : l + 1])

    def __sub__(self, other: "TimeSeries") -> "TimeSeries":
        if self.dim != other.dim or self.horizon != other.horizon:
            raise ValueError("series shape mismatch")
        return TimeSeries(self.points - other.points)


@dataclass(frozen=True)
class TriangularArray:
    """Values Xi[k,l] for 0 <= k < l <= N, stored densely.

    ``data`` has shape (N+1, N+1) + entry_shape; only the strict upper
    triangle in the first two axes is meaningful.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim < 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError("data must have shape (N+1, N+1, ...)")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def horizon(self) -> int:
        return self.data.shape[0] - 1

    @property
    def entry_shape(self) -> tuple:
        return self.data.shape[2:]

    def __getitem__(self, kl) -> np.ndarray:
        k, l = kl
        if not 0 <= k < l <= self.horizon:
            raise IndexError(f"triangular index out of range: ({k},{l})")
        return self.data[k, l]

    def norms(self, norm: NormChoice = NormChoice.L2) -> np.ndarray:
        """(N+1, N+1) array of entry norms; lower triangle is zero."""
        out = norm.of_axis(self.data, 2)
        return np.triu(out, k=1)

    def __sub__(self, other: "TriangularArray") -> "TriangularArray":
        if self.data.shape != other.data.shape:
            raise ValueError("triangular array shape mismatch")
        return TriangularArray(self.data - other.data)

    @staticmethod
    def from_function(N: int, fn, entry_shape: tuple = ()) -> "TriangularArray":
        data = np.zeros((N + 1, N + 1) + entry_shape)
        for k in range(N):
            for l in range(k + 1, N + 1):
                data[k, l] = fn(k, l)
        return TriangularArray(data)


def increments(w: TimeSeries) -> TriangularArray:
    """Increment array w[k,l] = w_l - w_k."""
    pts = w.points
    data = pts[None, :, :] - pts[:, None, :]
    n = pts.shape[0]
    mask = np.tril(np.ones((n, n), dtype=bool))
    data[mask] = 0.0
    return TriangularArray(data)


def delta(xi: TriangularArray, k: int, l: int, m: int) -> np.ndarray:
    """delta Xi[k,l,m] = Xi[k,m] - Xi[k,l] - Xi[l,m]; requires k < l < m."""
    if not 0 <= k < l < m <= xi.horizon:
        raise IndexError(f"delta requires 0 <= k < l < m <= N, got ({k},{l},{m})")
    return xi.data[k, m] - xi.data[k, l] - xi.data[l, m]
