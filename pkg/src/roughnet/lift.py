"""Level-2 iterated-sums lift, Chen's identity, homogeneous norm, rho_p.

The lift of a d-dimensional series w is the triangular array of d x d
matrices

    W2[k,l][mu,nu] = sum_{j=k}^{l-1} (w^mu_j - w^mu_k) (w^nu_{j+1} - w^nu_j),

computed with the incremental recursion W2[k,l+1] = W2[k,l] + w[k,l] (x) w[l,l+1].
It satisfies Chen's identity

    delta W2[k,l,m][mu,nu] = (w^mu_l - w^mu_k)(w^nu_m - w^nu_l),

which is the defining algebraic property (and the test for the sign
convention of the summand).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import NormChoice, TimeSeries, TriangularArray

__all__ = ["LiftedSeries", "lift", "homogeneous_norm", "rho_p"]


@dataclass(frozen=True)
class LiftedSeries:
    """A series together with its level-2 iterated-sums lift."""

    base: TimeSeries
    second_level: TriangularArray

    def __post_init__(self):
        d = self.base.dim
        if self.second_level.entry_shape != (d, d):
            raise ValueError("second level entries must be d x d matrices")
        if self.second_level.horizon != self.base.horizon:
            raise ValueError("horizon mismatch between base and lift")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def horizon(self) -> int:
        return self.base.horizon


def lift(w: TimeSeries) -> LiftedSeries:
    """Compute the level-2 lift of a series; O(N^2 d^2) total."""
    if w.horizon < 1:
        raise ValueError("lift requires at least one step (N >= 1)")
    pts = w.points
    n, d = pts.shape
    steps = pts[1:] - pts[:-1]  # steps[l] = w_{l+1} - w_l
    data = np.zeros((n, n, d, d))
    for k in range(n - 1):
        acc = np.zeros((d, d))
        for l in range(k + 1, n):
            # W2[k,l] = W2[k,l-1] + (w_{l-1} - w_k) (x) (w_l - w_{l-1})
            acc = acc + np.outer(pts[l - 1] - pts[k], steps[l - 1])
            data[k, l] = acc
    return LiftedSeries(w, TriangularArray(data))


def _check_rough_p(p: float) -> None:
    if not 2.0 <= p < 3.0:
        raise ValueError(f"p must lie in [2,3), got {p}")


def homogeneous_norm(W: LiftedSeries, p: float, k: int = 0, l: int | None = None,
                     norm: NormChoice = NormChoice.L2) -> float:
    """|||W|||_p over [k,l]: pvar of the base plus sqrt of p/2-variation of the lift."""
    from .pvar import pvar

    _check_rough_p(p)
    if l is None:
        l = W.horizon
    first = pvar(W.base, p, k, l, norm=norm)
    second = pvar(W.second_level, p / 2.0, k, l, norm=norm)
    return first + second ** 0.5


def rho_p(W: LiftedSeries, W_t: LiftedSeries, p: float,
          norm: NormChoice = NormChoice.L2) -> float:
    """Pseudometric: ||w - w~||_p + ||W2 - W2~||_{p/2} over [0,N]."""
    from .pvar import pvar

    _check_rough_p(p)
    if W.dim != W_t.dim or W.horizon != W_t.horizon:
        raise ValueError("lifted series dimension/horizon mismatch")
    first = pvar(W.base - W_t.base, p, norm=norm)
    second = pvar(W.second_level - W_t.second_level, p / 2.0, norm=norm)
    return first + second
