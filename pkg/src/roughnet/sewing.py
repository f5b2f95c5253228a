"""Discrete sewing defect bounds and the two Gronwall bounds.

``sewing_defect`` measures how far a germ is from telescoping; the check_*
operations certify the defect against the explicit sewing constant
2^theta zeta_N(theta), reporting per-interval ratios rather than a bare
boolean so that worst offenders can be inspected.  ``zeta_N`` is always
evaluated at the global horizon of the array, matching the constant
C_{p,N} used by the regime bounds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pvar import Control
from .series import NormChoice, TimeSeries, TriangularArray

__all__ = [
    "zeta_partial",
    "sewing_defect",
    "defect_norms",
    "SewingBudget",
    "SewingReport",
    "check_sewing_bound",
    "check_generalized_sewing",
    "discrete_gronwall_bound",
    "GronwallInput",
    "HypothesisViolation",
    "rough_gronwall_bound",
]


def zeta_partial(s: float, N: int) -> float:
    """Partial sum zeta_N(s) = sum_{n=1}^N n^(-s)."""
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    n = np.arange(1, N + 1, dtype=float)
    return float(np.sum(n ** (-s)))


def sewing_defect(xi: TriangularArray, k: int, l: int) -> np.ndarray:
    """sum_{j=k}^{l-1} Xi[j,j+1] - Xi[k,l]."""
    if not 0 <= k < l <= xi.horizon:
        raise IndexError(f"need 0 <= k < l <= N, got ({k},{l})")
    steps = xi.data[np.arange(k, l), np.arange(k + 1, l + 1)]
    return np.sum(steps, axis=0) - xi.data[k, l]


def defect_norms(xi: TriangularArray, norm: NormChoice = NormChoice.L2) -> np.ndarray:
    """(N+1, N+1) matrix of |defect| over all pairs, via prefix sums."""
    N = xi.horizon
    steps = xi.data[np.arange(N), np.arange(1, N + 1)]
    prefix = np.concatenate([np.zeros((1,) + xi.entry_shape), np.cumsum(steps, axis=0)])
    tele = prefix[None, :] - prefix[:, None]  # tele[k,l] = sum of single steps
    out = norm.of_axis(tele - xi.data, 2)
    return np.triu(out, k=1)


@dataclass(frozen=True)
class SewingBudget:
    """Exponent/control data for one sewing hypothesis term."""

    alpha: float
    beta: float
    omega: Control
    omega_tilde: Control

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.theta <= 1:
            raise ValueError(f"alpha + beta must exceed 1, got {self.theta}")

    @property
    def theta(self) -> float:
        return self.alpha + self.beta


@dataclass
class SewingReport:
    """Per-pair defect/bound comparison for a sewing check."""

    defect: np.ndarray        # (N+1, N+1), upper triangle
    bound: np.ndarray         # (N+1, N+1), upper triangle
    ratio: np.ndarray         # defect / bound (0/0 -> 0)
    worst_ratio: float
    worst_pair: tuple[int, int]
    within_bound: bool
    hypothesis_ok: bool
    hypothesis_violations: list[tuple[int, int, int]] = field(default_factory=list)


def _ratio_report(defect: np.ndarray, bound: np.ndarray,
                  hypothesis_ok: bool, violations) -> SewingReport:
    N = defect.shape[0] - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, defect / np.where(bound > 0, bound, 1.0),
                         np.where(defect > 0, np.inf, 0.0))
    ratio = np.triu(ratio, k=1)
    idx = np.unravel_index(np.argmax(ratio), ratio.shape)
    return SewingReport(
        defect=defect,
        bound=bound,
        ratio=ratio,
        worst_ratio=float(ratio[idx]),
        worst_pair=(int(idx[0]), int(idx[1])),
        within_bound=bool(np.max(ratio) <= 1.0 + 1e-9),
        hypothesis_ok=hypothesis_ok,
        hypothesis_violations=list(violations),
    )


def _delta_hypothesis_violations(xi: TriangularArray, rhs_fn, norm: NormChoice,
                                 max_report: int = 16) -> list:
    """Triples (k,l,m) where |delta Xi| exceeds the budget right-hand side."""
    N = xi.horizon
    out = []
    for l in range(1, N):
        # delta[k,m] = Xi[k,m] - Xi[k,l] - Xi[l,m] for k < l < m
        d = xi.data[:l, l + 1:] - xi.data[:l, l, None] - xi.data[None, l, l + 1:]
        mag = norm.of_axis(d, 2)
        rhs = rhs_fn(l)  # shape (l, N-l)
        bad = mag > rhs * (1.0 + 1e-9) + 1e-15
        if np.any(bad):
            for k, m_off in zip(*np.nonzero(bad)):
                out.append((int(k), l, int(m_off) + l + 1))
                if len(out) >= max_report:
                    return out
    return out


def check_sewing_bound(xi: TriangularArray, budget: SewingBudget,
                       norm: NormChoice = NormChoice.L2) -> SewingReport:
    """Certify |defect| <= 2^theta zeta_N(theta) omega^alpha omega_t^beta per pair.

    The delta-hypothesis |delta Xi[k,l,m]| <= omega[k,l]^alpha omega_t[l,m]^beta
    is verified on all triples; violations are reported, not raised.
    """
    N = xi.horizon
    w = budget.omega.values.data
    wt = budget.omega_tilde.values.data
    viol = _delta_hypothesis_violations(
        xi, lambda l: w[:l, l, None] ** budget.alpha * wt[None, l, l + 1:] ** budget.beta,
        norm)
    const = 2.0 ** budget.theta * zeta_partial(budget.theta, max(N, 1))
    bound = np.triu(const * w ** budget.alpha * wt ** budget.beta, k=1)
    return _ratio_report(defect_norms(xi, norm), bound, not viol, viol)


def check_generalized_sewing(xi: TriangularArray, budgets: list[SewingBudget],
                             norm: NormChoice = NormChoice.L2) -> SewingReport:
    """Multi-term sewing bound 2^theta_min zeta_N(theta_min) sum_r omega_r^a omega_t_r^b."""
    if not budgets:
        raise ValueError("at least one budget is required")
    N = xi.horizon
    theta_hat = min(b.theta for b in budgets)

    def rhs(l):
        acc = 0.0
        for b in budgets:
            w, wt = b.omega.values.data, b.omega_tilde.values.data
            acc = acc + w[:l, l, None] ** b.alpha * wt[None, l, l + 1:] ** b.beta
        return acc

    viol = _delta_hypothesis_violations(xi, rhs, norm)
    const = 2.0 ** theta_hat * zeta_partial(theta_hat, max(N, 1))
    total = np.zeros((N + 1, N + 1))
    for b in budgets:
        total += b.omega.values.data ** b.alpha * b.omega_tilde.values.data ** b.beta
    bound = np.triu(const * total, k=1)
    return _ratio_report(defect_norms(xi, norm), bound, not viol, viol)


def discrete_gronwall_bound(c: float, v, j: int) -> tuple[float, float]:
    """Classical discrete Gronwall majorants at index j.

    Returns (c * prod_{i=1}^{j-1} (1 + v_i), c * exp(sum_{i=1}^{j-1} v_i)).
    ``v`` is indexed from 1, i.e. v[0] plays the role of v_1.
    """
    if c < 0:
        raise ValueError("c must be non-negative")
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("v must be non-negative")
    head = v[: max(j - 1, 0)]
    return float(c * np.prod(1.0 + head)), float(c * np.exp(np.sum(head)))


class HypothesisViolation(ValueError):
    """Raised when a Gronwall input fails its hypothesis inequality."""


@dataclass(frozen=True)
class GronwallInput:
    """Inputs for the rough Gronwall bound.

    The hypothesis |z[k,l]| <= C max_{j<=l}|z_j| omega[k,l]^(1/kappa)
    + omega_t[k,l]^(1/rho) must hold whenever omega[k,l] <= L or l = k+1.
    """

    z: TimeSeries
    omega: Control
    omega_tilde: Control
    C: float
    kappa: float
    rho: float
    L: float

    def __post_init__(self):
        if self.C <= 0 or self.L <= 0:
            raise ValueError("C and L must be positive")
        if self.kappa < 1 or self.rho < 1:
            raise ValueError("kappa and rho must be >= 1")

    def first_violation(self, norm: NormChoice = NormChoice.L2):
        """First (k,l) on the hypothesis index set violating the inequality."""
        pts = self.z.points
        N = self.z.horizon
        run_max = np.maximum.accumulate(norm.of_axis(pts, 1))
        w = self.omega.values.data
        wt = self.omega_tilde.values.data
        for k in range(N):
            for l in range(k + 1, N + 1):
                if l != k + 1 and w[k, l] > self.L:
                    continue
                lhs = norm.of(pts[l] - pts[k])
                rhs = (self.C * run_max[l] * w[k, l] ** (1.0 / self.kappa)
                       + wt[k, l] ** (1.0 / self.rho))
                if lhs > rhs * (1.0 + 1e-9) + 1e-15:
                    return (k, l, lhs, rhs)
        return None


def rough_gronwall_bound(inp: GronwallInput, norm: NormChoice = NormChoice.L2,
                         verify: bool = True) -> float:
    """Rough Gronwall majorant of max_j |z_j|.

    2 exp(omega[0,N]/(alpha L)) { |z_0| + max_j ( omega_t[0,j]^(1/rho)
    (1 + 2 omega[0,j]/(alpha L))^(1-1/rho) exp(-omega[0,j]/(alpha L)) ) }
    with alpha = min(1, 1/(L (2 C e^2)^kappa)).
    """
    if verify:
        bad = inp.first_violation(norm)
        if bad is not None:
            k, l, lhs, rhs = bad
            raise HypothesisViolation(
                f"hypothesis fails at (k,l)=({k},{l}): |z_kl|={lhs:.6g} > {rhs:.6g}")
    N = inp.z.horizon
    alpha = min(1.0, 1.0 / (inp.L * (2.0 * inp.C * np.e ** 2) ** inp.kappa))
    aL = alpha * inp.L
    w0 = np.array([0.0] + [inp.omega.values.data[0, j] for j in range(1, N + 1)])
    wt0 = np.array([0.0] + [inp.omega_tilde.values.data[0, j] for j in range(1, N + 1)])
    terms = (wt0 ** (1.0 / inp.rho)
             * (1.0 + 2.0 * w0 / aL) ** (1.0 - 1.0 / inp.rho)
             * np.exp(-w0 / aL))
    z0 = norm.of(inp.z.points[0])
    with np.errstate(over="ignore"):  # an infinite majorant is still valid
        return float(2.0 * np.exp(w0[N] / aL) * (z0 + np.max(terms)))
