import numpy as np
import pytest

from roughnet.lift import LiftedSeries, homogeneous_norm, lift, rho_p
from roughnet.pvar import pvar
from roughnet.series import TimeSeries, TriangularArray, delta


def direct_lift_entry(pts, k, l):
    """Second-level entry straight from the defining sum."""
    d = pts.shape[1]
    acc = np.zeros((d, d))
    for j in range(k, l):
        acc += np.outer(pts[j] - pts[k], pts[j + 1] - pts[j])
    return acc


def test_lift_matches_defining_sum():
    rng = np.random.default_rng(0)
    w = TimeSeries(rng.normal(size=(11, 3)))
    W = lift(w)
    for k in range(11):
        for l in range(k + 1, 11):
            assert np.allclose(W.second_level[k, l],
                               direct_lift_entry(w.points, k, l), atol=1e-12)


def test_chen_identity():
    rng = np.random.default_rng(1)
    w = TimeSeries(rng.normal(size=(15, 2)))
    W = lift(w)
    pts = w.points
    for k, l, m in [(0, 1, 2), (0, 7, 14), (3, 8, 12)]:
        got = delta(W.second_level, k, l, m)
        want = np.outer(pts[l] - pts[k], pts[m] - pts[l])
        assert np.allclose(got, want, atol=1e-12)


def test_lift_of_linear_ramp():
    # one-dimensional ramp w_k = k: W2[k,l] = sum_{j=k}^{l-1} (j-k) = binomial
    w = TimeSeries(np.arange(6.0))
    W = lift(w)
    for k in range(6):
        for l in range(k + 1, 6):
            n = l - k
            assert W.second_level[k, l][0, 0] == pytest.approx(n * (n - 1) / 2)


def test_lifted_series_validation():
    w = TimeSeries(np.zeros((4, 2)))
    with pytest.raises(ValueError):
        LiftedSeries(w, TriangularArray(np.zeros((4, 4, 3, 3))))
    with pytest.raises(ValueError):
        LiftedSeries(w, TriangularArray(np.zeros((5, 5, 2, 2))))


def test_homogeneous_norm_structure():
    rng = np.random.default_rng(2)
    w = TimeSeries(rng.normal(size=(9, 2)))
    W = lift(w)
    p = 2.5
    expected = pvar(w, p) + pvar(W.second_level, p / 2.0) ** 0.5
    assert homogeneous_norm(W, p) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        homogeneous_norm(W, 1.5)
    with pytest.raises(ValueError):
        homogeneous_norm(W, 3.0)


def test_rho_p_is_a_pseudometric_at_zero():
    rng = np.random.default_rng(3)
    w = TimeSeries(rng.normal(size=(9, 2)))
    W = lift(w)
    assert rho_p(W, W, 2.2) == 0.0
    W2 = lift(TimeSeries(w.points + 0.1))
    # constant shifts leave increments (and hence the distance) unchanged
    assert rho_p(W, W2, 2.2) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        rho_p(W, lift(TimeSeries(rng.normal(size=(8, 2)))), 2.2)
