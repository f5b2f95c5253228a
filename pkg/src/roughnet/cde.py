"""Controlled difference equations: the ResNet forward pass and its remainders.

The state update is

    x_{k+1} = x_k + sum_mu f_mu(x_k) (w^mu_{k+1} - w^mu_k),

driven by a collection of vector fields f_1..f_d on R^m.  The module
provides the solver, the remainder arrays R/I/J used by the regime bounds,
the composed fields F[mu,nu] = Df_nu f_mu, and the exact embedding of a
plain residual architecture y_{k+1} = y_k + sigma(y_k, theta_k) into this
linear-in-control form.

Smoothness data (sup norms of derivatives up to order 3) is carried on the
field system.  For the built-in activations these are assembled from
grid-searched scalar derivative sups times powers of the matrix operator
norm, which upper-bounds the true C^n_b norm, so certificates computed
from them remain valid.  ReLU is rejected (not C^1); a softplus surrogate
with a sharpness parameter is available instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .lift import LiftedSeries
from .series import TimeSeries, TriangularArray, increments

__all__ = [
    "VectorFieldSystem",
    "SolutionBundle",
    "solve",
    "remainders",
    "F_fields",
    "embed_resnet",
    "resnet_forward",
    "estimate_cnb_norm",
    "derivative_sup",
    "tanh_matvec",
]

_FD_STEP = 1e-6


# ---------------------------------------------------------------------------
# scalar activations


@lru_cache(maxsize=None)
def _grid_sup(kind: str, order: int, lo: float = -8.0, hi: float = 8.0,
              n: int = 160001) -> float:
    """Dense grid search for sup |act^(order)| on [lo, hi]."""
    x = np.linspace(lo, hi, n)
    return float(np.max(np.abs(_ACTIVATIONS[kind][order](x))))


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _make_softplus(beta: float):
    def act(x):
        return np.logaddexp(0.0, beta * x) / beta

    def d1(x):
        return _sigmoid(beta * x)

    def d2(x):
        s = _sigmoid(beta * x)
        return beta * s * (1.0 - s)

    def d3(x):
        s = _sigmoid(beta * x)
        return beta ** 2 * s * (1.0 - s) * (1.0 - 2.0 * s)

    return {0: act, 1: d1, 2: d2, 3: d3}


_ACTIVATIONS: dict[str, dict[int, Callable]] = {
    "tanh": {
        0: np.tanh,
        1: lambda x: 1.0 - np.tanh(x) ** 2,
        2: lambda x: -2.0 * np.tanh(x) * (1.0 - np.tanh(x) ** 2),
        3: lambda x: -2.0 * (1.0 - np.tanh(x) ** 2) * (1.0 - 3.0 * np.tanh(x) ** 2),
    },
    "sigmoid": {
        0: _sigmoid,
        1: lambda x: _sigmoid(x) * (1.0 - _sigmoid(x)),
        2: lambda x: _sigmoid(x) * (1.0 - _sigmoid(x)) * (1.0 - 2.0 * _sigmoid(x)),
        3: lambda x: _sigmoid(x) * (1.0 - _sigmoid(x))
        * (1.0 - 6.0 * _sigmoid(x) + 6.0 * _sigmoid(x) ** 2),
    },
    "linear": {
        0: lambda x: np.asarray(x, dtype=float),
        1: lambda x: np.ones_like(np.asarray(x, dtype=float)),
        2: lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        3: lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    },
}

# sup |act| for bounded activations (None: unbounded)
_ACT_SUP: dict[str, Optional[float]] = {"tanh": 1.0, "sigmoid": 1.0, "linear": None}


# ---------------------------------------------------------------------------
# vector field systems


@dataclass(frozen=True)
class VectorFieldSystem:
    """d vector fields on R^m with derivative and smoothness-norm data.

    ``cnb_norms[n]`` is an upper bound for max_mu max_{k<=n} sup |D^k f_mu|
    (derivative orders only; the sup of f itself is ``sup_norm``).
    Evaluation callables must be pure (reentrant, no hidden state).
    """

    num_fields: int
    state_dim: int
    eval_field: Callable[[int, np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[int, np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[int, np.ndarray], np.ndarray]] = None
    cnb_norms: dict[int, float] = field(default_factory=dict)
    sup_norm: Optional[float] = None
    norms_estimated: bool = False

    def field_matrix(self, x: np.ndarray) -> np.ndarray:
        """(m, d) matrix with columns f_mu(x)."""
        return np.stack([self.eval_field(mu, x) for mu in range(self.num_fields)],
                        axis=1)

    def jacobian_or_fd(self, mu: int, x: np.ndarray) -> np.ndarray:
        if self.jacobian is not None:
            return self.jacobian(mu, x)
        return _fd_jacobian(lambda y: self.eval_field(mu, y), x, _FD_STEP)

    def cnb(self, n: int) -> float:
        """C^n_b norm bound; raises if not available."""
        if n not in self.cnb_norms:
            raise ValueError(f"no C^{n}_b norm data for this field system")
        return self.cnb_norms[n]

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(vectors: np.ndarray) -> "VectorFieldSystem":
        """State-independent fields f_mu(x) = c_mu; vectors has shape (d, m)."""
        vecs = np.atleast_2d(np.asarray(vectors, dtype=float))
        d, m = vecs.shape
        sup = float(np.max(np.sqrt(np.sum(vecs ** 2, axis=1)))) if d else 0.0
        return VectorFieldSystem(
            num_fields=d, state_dim=m,
            eval_field=lambda mu, x: vecs[mu].copy(),
            jacobian=lambda mu, x: np.zeros((m, m)),
            hessian=lambda mu, x: np.zeros((m, m, m)),
            cnb_norms={1: 0.0, 2: 0.0, 3: 0.0},
            sup_norm=sup)

    @staticmethod
    def linear(mats: np.ndarray) -> "VectorFieldSystem":
        """f_mu(x) = A_mu x; mats has shape (d, m, m).  Unbounded (sup_norm None)."""
        A = np.asarray(mats, dtype=float)
        if A.ndim == 2:
            A = A[None]
        d, m, _ = A.shape
        op = max(float(np.linalg.norm(A[mu], 2)) for mu in range(d))
        return VectorFieldSystem(
            num_fields=d, state_dim=m,
            eval_field=lambda mu, x: A[mu] @ x,
            jacobian=lambda mu, x: A[mu].copy(),
            hessian=lambda mu, x: np.zeros((m, m, m)),
            cnb_norms={1: op, 2: op, 3: op},
            sup_norm=None)

    @staticmethod
    def activation(kind: str, mats: np.ndarray,
                   sharpness: float = 1.0) -> "VectorFieldSystem":
        """Componentwise activation after a per-field linear map: f_mu(x) = act(A_mu x).

        ``kind`` is one of tanh, sigmoid, linear, softplus.  ReLU is not C^1
        and is refused; use softplus with a sharpness parameter instead.
        """
        if kind == "relu":
            raise ValueError(
                "relu is not C^1; smoothness certification is impossible. "
                "Use kind='softplus' with a sharpness parameter as a surrogate.")
        A = np.asarray(mats, dtype=float)
        if A.ndim == 2:
            A = A[None]
        d, m, m2 = A.shape
        if m != m2:
            raise ValueError("activation fields require square matrices")

        if kind == "softplus":
            derivs = _make_softplus(sharpness)
            msup = [None, 1.0,
                    sharpness * 0.25,
                    sharpness ** 2 * float(_grid_sup("sigmoid", 2))]
            act_sup = None
        elif kind in _ACTIVATIONS:
            derivs = _ACTIVATIONS[kind]
            msup = [None] + [_grid_sup(kind, k) for k in (1, 2, 3)]
            act_sup = _ACT_SUP[kind]
        else:
            raise ValueError(f"unknown activation {kind!r}")

        def ev(mu, x):
            return derivs[0](A[mu] @ x)

        def jac(mu, x):
            return derivs[1](A[mu] @ x)[:, None] * A[mu]

        def hess(mu, x):
            c = derivs[2](A[mu] @ x)
            return c[:, None, None] * A[mu][:, :, None] * A[mu][:, None, :]

        ops = np.array([np.linalg.norm(A[mu], 2) for mu in range(d)])
        cnb = {}
        for n in (1, 2, 3):
            per_mu = [max(msup[k] * op ** k for k in range(1, n + 1)) for op in ops]
            cnb[n] = float(max(per_mu)) if d else 0.0
        sup = None if act_sup is None else act_sup * math.sqrt(m)
        return VectorFieldSystem(
            num_fields=d, state_dim=m,
            eval_field=ev, jacobian=jac, hessian=hess,
            cnb_norms=cnb, sup_norm=sup)

    @staticmethod
    def from_callables(num_fields: int, state_dim: int, evals,
                       cnb_norms: Optional[dict[int, float]] = None,
                       sup_norm: Optional[float] = None) -> "VectorFieldSystem":
        """Black-box fields; derivatives via central finite differences."""

        def ev(mu, x):
            return np.asarray(evals[mu](np.asarray(x, dtype=float)), dtype=float)

        def jac(mu, x):
            return _fd_jacobian(lambda y: ev(mu, y), np.asarray(x, dtype=float),
                                _FD_STEP)

        return VectorFieldSystem(
            num_fields=num_fields, state_dim=state_dim,
            eval_field=ev, jacobian=jac, hessian=None,
            cnb_norms=dict(cnb_norms or {}), sup_norm=sup_norm,
            norms_estimated=cnb_norms is None)


def _fd_jacobian(fn, x: np.ndarray, h: float) -> np.ndarray:
    m = x.size
    f0 = fn(x)
    J = np.zeros((f0.size, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        J[:, j] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return J


# ---------------------------------------------------------------------------
# solver and remainders


def solve(f: VectorFieldSystem, w: TimeSeries, xi: np.ndarray) -> TimeSeries:
    """Iterate x_{k+1} = x_k + sum_mu f_mu(x_k) w^mu_{k,k+1} from x_0 = xi."""
    if w.dim != f.num_fields:
        raise ValueError(f"driver has {w.dim} channels but system has "
                         f"{f.num_fields} fields")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (f.state_dim,):
        raise ValueError(f"initial condition must lie in R^{f.state_dim}")
    N = w.horizon
    steps = w.points[1:] - w.points[:-1]
    out = np.zeros((N + 1, f.state_dim))
    out[0] = xi
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(N):
            out[k + 1] = out[k] + f.field_matrix(out[k]) @ steps[k]
            if not np.all(np.isfinite(out[k + 1])):
                raise OverflowError(f"solution became non-finite at step {k + 1}")
    return TimeSeries(out)


@dataclass(frozen=True)
class SolutionBundle:
    """Solution plus its remainder arrays.

    I[k,l] = x[k,l] - sum_mu f_mu(x_k) w^mu[k,l]          (first-order defect)
    J[k,l][mu] = f_mu(x_l) - f_mu(x_k) - sum_nu Df_mu(x_k) f_nu(x_k) w^nu[k,l]
    R = I in the Young regime; in the rough regime the level-2 germ is
    subtracted as well: R[k,l] = I[k,l] - sum_{mu,nu} Df_nu(x_k) f_mu(x_k) W2[k,l][mu,nu].
    """

    x: TimeSeries
    R: TriangularArray
    I: TriangularArray
    J: TriangularArray  # entry shape (d, m): J[k,l][mu] in R^m
    regime: str


def remainders(f: VectorFieldSystem, w: TimeSeries, x: TimeSeries,
               regime: str = "young",
               lifted: Optional[LiftedSeries] = None) -> SolutionBundle:
    """Remainder arrays R, I, J of a solution x driven by w."""
    regime = regime.lower()
    if regime not in ("young", "rough"):
        raise ValueError(f"regime must be 'young' or 'rough', got {regime!r}")
    if regime == "rough" and lifted is None:
        raise ValueError("rough regime requires the level-2 lift of the driver")
    if f.jacobian is None and f.hessian is None and regime == "rough":
        raise ValueError("rough regime requires jacobian data")
    N = w.horizon
    d, m = f.num_fields, f.state_dim
    xinc = increments(x).data
    winc = increments(w).data
    Idata = np.zeros((N + 1, N + 1, m))
    Jdata = np.zeros((N + 1, N + 1, d, m))
    Rdata = np.zeros((N + 1, N + 1, m))
    fvals = np.stack([f.field_matrix(x.points[k]) for k in range(N + 1)])  # (N+1, m, d)
    for k in range(N):
        Fk = fvals[k]
        Dfk = np.stack([f.jacobian_or_fd(mu, x.points[k]) for mu in range(d)])
        germ = winc[k] @ Fk.T                                # (N+1, m)
        Idata[k] = xinc[k] - germ
        # J[k,l,mu] = f_mu(x_l) - f_mu(x_k) - Df_mu(x_k) (F(x_k) w[k,l])
        first = fvals[:, :, :].transpose(0, 2, 1) - Fk.T[None]   # (N+1, d, m)
        Jdata[k] = first - np.einsum("uij,lj->lui", Dfk, germ)
        if regime == "rough":
            W2k = lifted.second_level.data[k]                # (N+1, d, d)
            M = np.einsum("ij,ljv->liv", Fk, W2k)            # (N+1, m, d)
            Rdata[k] = Idata[k] - np.einsum("vij,ljv->li", Dfk, M)
        else:
            Rdata[k] = Idata[k]
    for arr in (Idata, Jdata, Rdata):
        mask = np.tril(np.ones((N + 1, N + 1), dtype=bool))
        arr[mask] = 0.0
    return SolutionBundle(x=x, R=TriangularArray(Rdata), I=TriangularArray(Idata),
                          J=TriangularArray(Jdata), regime=regime)


def F_fields(f: VectorFieldSystem) -> VectorFieldSystem:
    """Composed fields F[mu,nu](x) = Df_nu(x) f_mu(x), indexed q = mu*d + nu.

    C^k_b data follows the chain-rule bound (2^(k+1) - 1) ||f||^2_{C^(k+1)_b}.
    """
    d, m = f.num_fields, f.state_dim

    def ev(q, x):
        mu, nu = divmod(q, d)
        return f.jacobian_or_fd(nu, x) @ f.eval_field(mu, x)

    jac = None
    if f.hessian is not None and f.jacobian is not None:
        def jac(q, x):
            mu, nu = divmod(q, d)
            H = f.hessian(nu, x)
            return np.einsum("ikj,k->ij", H, f.eval_field(mu, x)) \
                + f.jacobian(nu, x) @ f.jacobian(mu, x)

    cnb = {k: (2.0 ** (k + 1) - 1.0) * f.cnb_norms[k + 1] ** 2
           for k in (1, 2) if (k + 1) in f.cnb_norms}
    sup = None
    if f.sup_norm is not None and 1 in f.cnb_norms:
        sup = f.cnb_norms[1] * f.sup_norm
    return VectorFieldSystem(num_fields=d * d, state_dim=m, eval_field=ev,
                             jacobian=jac, hessian=None, cnb_norms=cnb,
                             sup_norm=sup, norms_estimated=f.norms_estimated)


# ---------------------------------------------------------------------------
# architecture embedding


def tanh_matvec(y: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """The standard residual block nonlinearity sigma(y, theta) = tanh(theta y)."""
    return np.tanh(theta @ y)


def resnet_forward(sigma, thetas: np.ndarray, y0: np.ndarray) -> np.ndarray:
    """Plain residual recursion y_{k+1} = y_k + sigma(y_k, theta_k); returns (N+1, m)."""
    thetas = np.asarray(thetas, dtype=float)
    y = np.asarray(y0, dtype=float)
    out = [y]
    for k in range(thetas.shape[0]):
        y = y + sigma(y, thetas[k])
        out.append(y)
    return np.stack(out)


def embed_resnet(sigma, thetas: np.ndarray,
                 y0: np.ndarray) -> tuple[VectorFieldSystem, TimeSeries, np.ndarray]:
    """Embed y_{k+1} = y_k + sigma(y_k, theta_k) into a controlled difference equation.

    With m the width and N the number of matrices, the embedding uses
    d = m^2 + 1 driver channels and state dimension n = m + d.  The state
    carries the features in its first m coordinates and the current theta
    matrix (row-major flattened) plus a time ramp in the last d.  The theta
    channels of the driver hold theta_k itself, so their increments are the
    per-layer weight differences and the theta block of the state tracks
    theta_k exactly; the time ramp channel fires sigma once per step.

    Guarantee: projecting the solution onto its first m coordinates
    reproduces the residual recursion exactly.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 3 or thetas.shape[1] != thetas.shape[2]:
        raise ValueError("thetas must have shape (N, m, m)")
    N, m, _ = thetas.shape
    if N < 1:
        raise ValueError("need at least one layer matrix")
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (m,):
        raise ValueError(f"y0 must lie in R^{m}")
    d = m * m + 1
    n = m + d

    w = np.zeros((N + 1, d))
    for k in range(N + 1):
        w[k, : m * m] = thetas[min(k, N - 1)].reshape(-1)  # row-major
        w[k, d - 1] = float(k)

    basis = np.eye(n)

    def ev(q, x):
        if q < d - 1:
            return basis[m + q].copy()
        out = basis[m + d - 1].copy()
        out[:m] += sigma(x[:m], x[m : m + m * m].reshape(m, m))
        return out

    vfs = VectorFieldSystem(num_fields=d, state_dim=n, eval_field=ev,
                            jacobian=None, hessian=None, cnb_norms={},
                            sup_norm=None, norms_estimated=True)
    x0 = np.zeros(n)
    x0[:m] = y0
    x0[m : m + m * m] = thetas[0].reshape(-1)
    return vfs, TimeSeries(w), x0


# ---------------------------------------------------------------------------
# smoothness-norm estimation


def _probe_points(f: VectorFieldSystem, probe_box, grid_resolution: int) -> np.ndarray:
    if np.isscalar(probe_box):
        b = float(probe_box)
        box = [(-b, b)] * f.state_dim
    else:
        box = [tuple(b) for b in probe_box]
    if len(box) != f.state_dim:
        raise ValueError("probe_box must have one (lo, hi) pair per coordinate")
    if grid_resolution ** f.state_dim <= 200_000:
        axes = [np.linspace(lo, hi, grid_resolution) for lo, hi in box]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([a.ravel() for a in mesh], axis=1)
    rng = np.random.default_rng(0)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return rng.uniform(lo, hi, size=(grid_resolution * 100, f.state_dim))


def derivative_sup(f: VectorFieldSystem, k: int, probe_box,
                   grid_resolution: int = 41) -> float:
    """Grid estimate of max_mu sup |D^k f_mu| over a box (one order only).

    Jacobians use their operator 2-norm; higher orders fall back to the
    largest slice/entry magnitude.  The result is a lower estimate of the
    true sup (the grid may miss the maximiser).  Orders above 3 are
    unsupported.
    """
    if not 1 <= k <= 3:
        raise ValueError(f"unsupported derivative order {k}")
    points = _probe_points(f, probe_box, grid_resolution)

    def hess_at(mu, x):
        if f.hessian is not None:
            return f.hessian(mu, x)
        Hcols = [_fd_jacobian(lambda y: f.jacobian_or_fd(mu, y)[:, j], x, 1e-4)
                 for j in range(f.state_dim)]
        return np.stack(Hcols, axis=2)  # H[i, l, j] = d_l d_j f_i

    best = 0.0
    for x in points:
        for mu in range(f.num_fields):
            if k == 1:
                val = float(np.linalg.norm(f.jacobian_or_fd(mu, x), 2))
            elif k == 2:
                H = hess_at(mu, x)
                val = max(float(np.linalg.norm(H[i], 2))
                          for i in range(f.state_dim))
            else:
                h = 1e-3
                slabs = []
                for j in range(f.state_dim):
                    e = np.zeros(f.state_dim)
                    e[j] = h
                    slabs.append((hess_at(mu, x + e) - hess_at(mu, x - e))
                                 / (2.0 * h))
                val = float(np.max(np.abs(np.stack(slabs))))
            best = max(best, val)
    return best


def estimate_cnb_norm(f: VectorFieldSystem, order: int, probe_box,
                      grid_resolution: int = 41) -> float:
    """Grid estimate of the C^order_b norm: max_{k<=order} sup |D^k f|.

    A lower estimate of the true norm; see ``derivative_sup`` for the
    per-order search.  Orders above 3 are unsupported.
    """
    if not 1 <= order <= 3:
        raise ValueError(f"unsupported derivative order {order}")
    return max(derivative_sup(f, k, probe_box, grid_resolution)
               for k in range(1, order + 1))
