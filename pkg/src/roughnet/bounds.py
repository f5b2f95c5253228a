"""Explicit constants and computable stability/a-priori certificates.

Each operation evaluates one of the headline estimates with its literal
constants, runs the corresponding simulation, and packages both sides in a
Certificate.  Constants can be astronomically large (they control worst
case behavior uniformly in the input), so bounds are computed and compared
in log space; ``bound_value`` may overflow to inf while ``log_bound``
stays finite.

Regimes: p in [1,2) is the first-order (Young) regime, p in [2,3) needs
the level-2 lift (rough regime); p = 2 belongs to the rough regime.

The rough-stability constant c'_{p,N} appears in two inconsistent variants
in the source material (a p-th root in the statement, none in the closing
display of the proof).  Both are exposed; certification defaults to the
larger (proof) variant.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cde import VectorFieldSystem, remainders, solve
from .lift import LiftedSeries, homogeneous_norm, rho_p
from .pvar import pvar
from .series import NormChoice, TimeSeries
from .sewing import zeta_partial

__all__ = [
    "RegimeError",
    "ConstantsTable",
    "constants",
    "Certificate",
    "onevar_stability_bound",
    "young_apriori",
    "young_stability",
    "rough_apriori",
    "rough_stability",
]

_HOLDS_SLACK = 1e-9


class RegimeError(ValueError):
    """p outside the regime supported by the requested bound."""


@dataclass(frozen=True)
class ConstantsTable:
    """All explicit constants for a given (p, N), by their literal formulas."""

    p: float
    N: int
    C_pN: float              # 2^(2/p) zeta_N(2/p)
    A_p: float               # 2^p (4^(p-1) C_pN^p + 1)
    c_young: float           # (4 e^2)^p (4^(p-1) C_pN^p + 1)
    K_p: float               # rough a priori, first level
    K_p_prime: float         # rough a priori, second level
    L_p: float               # 4^(3/2-2/p) 7^(2-3/p) C_pN
    c_rough: float           # 2^p e^(2p) (L_p + K_p^2 + K_p')^p
    c_rough_prime_statement: float   # 2^(1-2/p) c_rough^(1/p)
    c_rough_prime_proof: float       # 2^(1-2/p) c_rough

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "p", "N", "C_pN", "A_p", "c_young", "K_p", "K_p_prime", "L_p",
            "c_rough", "c_rough_prime_statement", "c_rough_prime_proof")}


def constants(p: float, N: int) -> ConstantsTable:
    """Evaluate every explicit constant at (p, N)."""
    if not 1.0 <= p < 3.0:
        raise RegimeError(f"constants are defined for p in [1,3), got {p}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    C = 2.0 ** (2.0 / p) * zeta_partial(2.0 / p, N)
    A = 2.0 ** p * (4.0 ** (p - 1.0) * C ** p + 1.0)
    c_young = (4.0 * math.e ** 2) ** p * (4.0 ** (p - 1.0) * C ** p + 1.0)
    K = 9.0 * 2.0 ** (6.0 * (1.0 - 1.0 / p)) * max(
        1.0,
        6.0 ** (1.0 - 1.0 / p)
        * 8.0 ** ((1.0 - 1.0 / p) * (1.0 - 2.0 / p))
        * C ** (1.0 - 1.0 / p))
    Kp = 3.0 * 2.0 ** (1.0 - 2.0 / p) * (1.0 + K ** 2)
    L = 4.0 ** (1.5 - 2.0 / p) * 7.0 ** (2.0 - 3.0 / p) * C
    c_rough = 2.0 ** p * math.e ** (2.0 * p) * (L + K ** 2 + Kp) ** p
    return ConstantsTable(
        p=p, N=N, C_pN=C, A_p=A, c_young=c_young, K_p=K, K_p_prime=Kp,
        L_p=L, c_rough=c_rough,
        c_rough_prime_statement=2.0 ** (1.0 - 2.0 / p) * c_rough ** (1.0 / p),
        c_rough_prime_proof=2.0 ** (1.0 - 2.0 / p) * c_rough)


@dataclass
class Certificate:
    """A computed bound paired with the simulated quantity it must dominate."""

    regime: str
    bound_value: float
    observed: float
    holds: bool
    log_bound: float
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "bound_value": self.bound_value,
            "observed": self.observed,
            "holds": self.holds,
            "log_bound": self.log_bound,
            "inputs": self.inputs,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _certify(regime: str, log_bound: float, observed: float,
             inputs: dict) -> Certificate:
    if observed <= 0.0:
        holds = True
    elif log_bound == -math.inf:
        holds = False
    else:
        holds = math.log(observed) <= log_bound + math.log1p(_HOLDS_SLACK)
    try:
        bound = math.exp(log_bound)
    except OverflowError:
        bound = math.inf
    return Certificate(regime=regime, bound_value=bound, observed=observed,
                       holds=holds, log_bound=log_bound, inputs=inputs)


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _hypothesis_label(f: VectorFieldSystem) -> str:
    return "estimated-hypothesis" if f.norms_estimated else "analytic-hypothesis"


def _sup_diff(x: TimeSeries, x_t: TimeSeries, norm: NormChoice) -> float:
    return float(np.max(norm.of_axis(x.points - x_t.points, 1)))


# ---------------------------------------------------------------------------
# 1-variation baseline


def onevar_stability_bound(f: VectorFieldSystem, w: TimeSeries, w_t: TimeSeries,
                           xi: np.ndarray, xi_t: np.ndarray,
                           norm: NormChoice = NormChoice.L2,
                           f_norms: tuple[float, float] | None = None) -> Certificate:
    """Classical 1-variation stability certificate.

    sup_k |x_k - x~_k| <= exp(L(f) ||w~||_1) (|xi - xi~| + ||f||_inf ||w - w~||_1).
    """
    if f_norms is not None:
        f_sup, f_lip = f_norms
    else:
        if f.sup_norm is None:
            raise ValueError("field system is unbounded; supply f_norms explicitly")
        f_sup, f_lip = f.sup_norm, f.cnb(1)
    x = solve(f, w, np.asarray(xi, dtype=float))
    x_t = solve(f, w_t, np.asarray(xi_t, dtype=float))
    observed = _sup_diff(x, x_t, norm)
    wt1 = pvar(w_t, 1.0, norm=norm)
    dw1 = pvar(w - w_t, 1.0, norm=norm)
    dxi = norm.of(np.asarray(xi, dtype=float) - np.asarray(xi_t, dtype=float))
    log_bound = f_lip * wt1 + _log(dxi + f_sup * dw1)
    return _certify("onevar", log_bound, observed, {
        "p": 1.0, "N": w.horizon, "f_sup": f_sup, "f_lip": f_lip,
        "wt_1var": wt1, "dw_1var": dw1, "dxi": dxi,
        "hypothesis": _hypothesis_label(f)})


# ---------------------------------------------------------------------------
# Young regime


def young_apriori(f: VectorFieldSystem, w: TimeSeries, p: float,
                  k: int = 0, l: int | None = None,
                  xi: np.ndarray | None = None,
                  norm: NormChoice = NormChoice.L2) -> Certificate:
    """Young a priori certificate for ||x||_p over [k,l].

    bound = 2 ( 2^p C_pN^(p-1) ||f||_C1^p ||w||_p^p  v  2 ||f||_C1 ||w||_p ).
    The looser proof-form bound (prefactor 3) is reported alongside.
    """
    if not 1.0 <= p < 2.0:
        raise RegimeError(f"Young a priori needs p in [1,2), got {p}")
    if l is None:
        l = w.horizon
    ct = constants(p, w.horizon)
    F1 = f.cnb(1)
    Wp = pvar(w, p, k, l, norm=norm)
    inner = max(2.0 ** p * ct.C_pN ** (p - 1.0) * F1 ** p * Wp ** p,
                2.0 * F1 * Wp)
    xi = np.zeros(f.state_dim) if xi is None else np.asarray(xi, dtype=float)
    x = solve(f, w, xi)
    observed = pvar(x, p, k, l, norm=norm)
    cert = _certify("young-apriori", _log(2.0 * inner), observed, {
        "p": p, "N": w.horizon, "interval": [k, l], "f_c1": F1,
        "w_pvar": Wp, "constants": ct.as_dict(),
        "proof_form_bound": 3.0 * inner,
        "hypothesis": _hypothesis_label(f)})
    if not cert.holds and observed <= 3.0 * inner * (1.0 + _HOLDS_SLACK):
        cert.inputs["note"] = ("statement-form bound violated but proof-form "
                               "bound holds")
    return cert


def young_stability(f: VectorFieldSystem,
                    pair: tuple[TimeSeries, np.ndarray],
                    pair_t: tuple[TimeSeries, np.ndarray],
                    p: float, norm: NormChoice = NormChoice.L2) -> Certificate:
    """Young stability certificate on sup_k |x_k - x~_k|.

    bound = 2 c^(1/p) exp( c L^p (||w||_p^p + ||w~||_p^p) ) (|dxi| + L ||w - w~||_p)
    with c = (4 e^2)^p (4^(p-1) C_pN^p + 1) and L >= max_mu ||f_mu||_C2.
    """
    if not 1.0 <= p < 2.0:
        raise RegimeError(f"Young stability needs p in [1,2), got {p}")
    w, xi = pair
    w_t, xi_t = pair_t
    ct = constants(p, w.horizon)
    L = f.cnb(2)
    x = solve(f, w, np.asarray(xi, dtype=float))
    x_t = solve(f, w_t, np.asarray(xi_t, dtype=float))
    observed = _sup_diff(x, x_t, norm)
    wp = pvar(w, p, norm=norm)
    wtp = pvar(w_t, p, norm=norm)
    dw = pvar(w - w_t, p, norm=norm)
    dxi = norm.of(np.asarray(xi, dtype=float) - np.asarray(xi_t, dtype=float))
    c = ct.c_young
    log_bound = (math.log(2.0) + math.log(c) / p
                 + c * L ** p * (wp ** p + wtp ** p)
                 + _log(dxi + L * dw))
    return _certify("young-stability", log_bound, observed, {
        "p": p, "N": w.horizon, "f_c2": L, "w_pvar": wp, "wt_pvar": wtp,
        "dw_pvar": dw, "dxi": dxi, "constants": ct.as_dict(),
        "hypothesis": _hypothesis_label(f)})


# ---------------------------------------------------------------------------
# rough regime


def rough_apriori(f: VectorFieldSystem, W: LiftedSeries, p: float,
                  k: int = 0, l: int | None = None,
                  xi: np.ndarray | None = None,
                  norm: NormChoice = NormChoice.L2) -> tuple[Certificate, Certificate]:
    """Rough a priori certificates for ||x||_p and ||I||_{p/2} over [k,l].

    The underlying estimate is stated for ||f||_C2 <= 1; the joint
    rescaling f -> f/lam, w -> lam w (lam = ||f||_C2 v 1) leaves the
    solution invariant and multiplies the homogeneous norm by lam, so the
    unit-norm bound is applied to lam |||W|||.
    """
    if not 2.0 <= p < 3.0:
        raise RegimeError(f"rough a priori needs p in [2,3), got {p}")
    if l is None:
        l = W.horizon
    ct = constants(p, W.horizon)
    lam = max(1.0, f.cnb(2))
    H = lam * homogeneous_norm(W, p, k, l, norm=norm)
    xi = np.zeros(f.state_dim) if xi is None else np.asarray(xi, dtype=float)
    x = solve(f, W.base, xi)
    bundle = remainders(f, W.base, x, regime="rough", lifted=W)
    obs_x = pvar(x, p, k, l, norm=norm)
    obs_I = pvar(bundle.I, p / 2.0, k, l, norm=norm)
    base_inputs = {
        "p": p, "N": W.horizon, "interval": [k, l], "f_c2": f.cnb(2),
        "scale": lam, "hom_norm": H / lam, "constants": ct.as_dict(),
        "hypothesis": _hypothesis_label(f)}
    cert_x = _certify("rough-apriori-x",
                      _log(ct.K_p * max(H ** p, H)), obs_x, dict(base_inputs))
    cert_I = _certify("rough-apriori-I",
                      _log(ct.K_p_prime * max(H ** (2.0 * p), H ** 2)), obs_I,
                      dict(base_inputs))
    return cert_x, cert_I


def rough_stability(f: VectorFieldSystem,
                    pair: tuple[LiftedSeries, np.ndarray],
                    pair_t: tuple[LiftedSeries, np.ndarray],
                    p: float, norm: NormChoice = NormChoice.L2,
                    c_prime_variant: str = "proof") -> Certificate:
    """Rough stability certificate on sup_k |x_k - x~_k|.

    bound = 2 c' exp( c ||f||_C3^p (|||W|||^p + |||W~|||^p) )
            (|dxi| + ||f||_C3 rho_p(W, W~)),
    certified against the proof-form c' by default; the statement value is
    reported alongside.
    """
    if not 2.0 <= p < 3.0:
        raise RegimeError(f"rough stability needs p in [2,3), got {p}")
    if c_prime_variant not in ("proof", "statement"):
        raise ValueError("c_prime_variant must be 'proof' or 'statement'")
    W, xi = pair
    W_t, xi_t = pair_t
    ct = constants(p, W.horizon)
    Lf = f.cnb(3)
    x = solve(f, W.base, np.asarray(xi, dtype=float))
    x_t = solve(f, W_t.base, np.asarray(xi_t, dtype=float))
    observed = _sup_diff(x, x_t, norm)
    H = homogeneous_norm(W, p, norm=norm)
    H_t = homogeneous_norm(W_t, p, norm=norm)
    rho = rho_p(W, W_t, p, norm=norm)
    dxi = norm.of(np.asarray(xi, dtype=float) - np.asarray(xi_t, dtype=float))
    c_prime = (ct.c_rough_prime_proof if c_prime_variant == "proof"
               else ct.c_rough_prime_statement)
    log_bound = (math.log(2.0) + math.log(c_prime)
                 + ct.c_rough * Lf ** p * (H ** p + H_t ** p)
                 + _log(dxi + Lf * rho))
    return _certify("rough-stability", log_bound, observed, {
        "p": p, "N": W.horizon, "f_c3": Lf, "hom_norm": H, "hom_norm_t": H_t,
        "rho_p": rho, "dxi": dxi, "c_prime_variant": c_prime_variant,
        "constants": ct.as_dict(), "hypothesis": _hypothesis_label(f)})
