"""p-variation seminorms and the algebra of discrete controls.

The p-variation of a triangular array over [k,l] is the maximum over all
increasing subsequences s of k..l (with both endpoints pinned) of

    ( sum_j |Xi[s_j, s_{j+1}]|^p )^(1/p).

The maximum decomposes at the last partition point, giving an O(n^2)
dynamic program that is agnostic to the exponent (it is valid for the
quasi-norm regime p < 1 as well).  ``omega[k,l] = pvar(...)^p`` is
superadditive, which makes it a discrete control; the helpers below build
new controls out of old ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import NormChoice, TimeSeries, TriangularArray, increments

__all__ = [
    "Control",
    "pvar",
    "pvar_from_norms",
    "pvar_control",
    "control_convex_map",
    "control_product",
    "pvar_grid",
]


def _norm_matrix(x, norm: NormChoice) -> np.ndarray:
    """(N+1, N+1) matrix of increment/entry norms for a series or array."""
    if isinstance(x, TimeSeries):
        x = increments(x)
    if not isinstance(x, TriangularArray):
        raise TypeError(f"expected TimeSeries or TriangularArray, got {type(x)!r}")
    return x.norms(norm)


def pvar_from_norms(A: np.ndarray, p: float, k: int, l: int) -> float:
    """p-variation over [k,l] given the precomputed entry-norm matrix A."""
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    if not 0 <= k <= l < A.shape[0]:
        raise IndexError(f"invalid interval [{k},{l}]")
    if k == l:
        return 0.0
    P = A[k : l + 1, k : l + 1] ** p
    n = l - k
    V = np.zeros(n + 1)
    for j in range(1, n + 1):
        V[j] = np.max(V[:j] + P[:j, j])
    return float(V[n] ** (1.0 / p))


def _pvar_row(A: np.ndarray, p: float, k: int) -> np.ndarray:
    """omega[k,l] = pvar^p over [k,l] for every l >= k, in one DP sweep."""
    n = A.shape[0]
    P = A[k:, k:] ** p
    V = np.zeros(n - k)
    for j in range(1, n - k):
        V[j] = np.max(V[:j] + P[:j, j])
    row = np.zeros(n)
    row[k:] = V
    return row


def pvar(x, p: float, k: int = 0, l: int | None = None,
         norm: NormChoice = NormChoice.L2) -> float:
    """p-variation of a time series or triangular array over [k,l].

    A time series is first converted to its increment array.  Degenerate
    intervals (k == l) give 0.
    """
    A = _norm_matrix(x, norm)
    if l is None:
        l = A.shape[0] - 1
    return pvar_from_norms(A, p, k, l)


@dataclass(frozen=True)
class Control:
    """Superadditive triangular array of non-negative scalars."""

    values: TriangularArray

    def __post_init__(self):
        if self.values.entry_shape != ():
            raise ValueError("control entries must be scalars")
        tri = np.triu(self.values.data, k=1)
        if np.any(tri < 0):
            raise ValueError("control entries must be non-negative")

    @property
    def horizon(self) -> int:
        return self.values.horizon

    def __getitem__(self, kl) -> float:
        return float(self.values[kl])

    def check_superadditive(self, tol: float = 1e-12) -> bool:
        """Exhaustive triple check: omega[k,l] + omega[l,m] <= omega[k,m]."""
        w = self.values.data
        N = self.horizon
        for l in range(1, N):
            lhs = w[:l, l, None] + w[None, l, l + 1:]
            rhs = w[:l, l + 1:]
            scale = 1.0 + np.abs(rhs)
            if np.any(lhs > rhs + tol * scale):
                return False
        return True


def pvar_control(x, p: float, norm: NormChoice = NormChoice.L2) -> Control:
    """Control omega[k,l] = pvar(x, p, k, l)^p.

    Superadditive by construction: concatenating optimal partitions of
    [k,l] and [l,m] gives an admissible partition of [k,m].
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    A = _norm_matrix(x, norm)
    n = A.shape[0]
    data = np.zeros((n, n))
    for k in range(n - 1):
        data[k] = _pvar_row(A, p, k)
    data = np.triu(data, k=1)
    return Control(TriangularArray(data))


def _check_phi(phi) -> None:
    """Sampled-chord sanity check: phi increasing, convex, phi(0) = 0."""
    if abs(phi(0.0)) > 1e-12:
        raise ValueError("phi(0) must be 0")
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = np.sort(rng.uniform(0.0, 10.0, size=2))
        lam = rng.uniform()
        mid = phi(lam * a + (1 - lam) * b)
        chord = lam * phi(a) + (1 - lam) * phi(b)
        if mid > chord + 1e-9 * (1 + abs(chord)):
            raise ValueError("phi fails a convexity chord check")
        if phi(b) < phi(a) - 1e-12:
            raise ValueError("phi must be non-decreasing")


def control_convex_map(omega: Control, phi, validate: bool = True) -> Control:
    """New control phi(omega) for increasing convex phi with phi(0) = 0."""
    if validate:
        _check_phi(phi)
    w = omega.values.data
    try:
        out = np.asarray(phi(w), dtype=float)
        if out.shape != w.shape:
            raise TypeError
    except TypeError:
        out = np.vectorize(phi)(w)
    return Control(TriangularArray(np.triu(out, k=1)))


def control_product(omega: Control, omega_t: Control,
                    alpha: float, beta: float) -> Control:
    """Control omega^alpha * omega_t^beta; requires alpha, beta > 0, alpha+beta >= 1."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if alpha + beta < 1:
        raise ValueError(f"alpha + beta must be >= 1, got {alpha + beta}")
    if omega.horizon != omega_t.horizon:
        raise ValueError("control horizon mismatch")
    out = omega.values.data ** alpha * omega_t.values.data ** beta
    return Control(TriangularArray(np.triu(out, k=1)))


def pvar_grid(x, p_values, k: int = 0, l: int | None = None,
              norm: NormChoice = NormChoice.L2) -> list[tuple[float, float]]:
    """Evaluate pvar at each p in p_values over one interval."""
    A = _norm_matrix(x, norm)
    if l is None:
        l = A.shape[0] - 1
    return [(float(p), pvar_from_norms(A, p, k, l)) for p in p_values]
