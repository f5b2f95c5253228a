"""End-to-end acceptance suite.

Each test covers one headline guarantee of the library, prints a single
PASS/FAIL line, and enforces a runtime budget.  Random instances are
generated from fixed seeds so the suite is reproducible.
"""
import math
import time

import mpmath
import numpy as np
from _oracles import brute_force_pvar

from roughnet.bounds import (constants, rough_apriori, rough_stability,
                             young_apriori, young_stability)
from roughnet.cde import (VectorFieldSystem, embed_resnet, resnet_forward,
                          solve, tanh_matvec)
from roughnet.lift import lift
from roughnet.pvar import (control_convex_map, control_product, pvar,
                           pvar_control)
from roughnet.series import TimeSeries, TriangularArray, increments
from roughnet.sewing import (GronwallInput, SewingBudget, check_sewing_bound,
                             rough_gronwall_bound)


def report(name, ok, elapsed, budget):
    in_time = elapsed <= budget
    status = "PASS" if (ok and in_time) else "FAIL"
    print(f"{status}: {name} ({elapsed:.1f}s / budget {budget:.0f}s)")
    assert ok, name
    assert in_time, f"{name} exceeded its {budget:.0f}s budget ({elapsed:.1f}s)"


def random_walk(rng, N, d, scale=1.0):
    steps = rng.normal(scale=scale / np.sqrt(N), size=(N, d))
    return TimeSeries(np.vstack([np.zeros(d), np.cumsum(steps, axis=0)]))


def tanh_fields(rng, d=2, m=2, scale=0.6):
    return VectorFieldSystem.activation(
        "tanh", rng.normal(scale=scale, size=(d, m, m)))


def test_variation_dynamic_program_matches_brute_force():
    t0 = time.perf_counter()
    ok = True
    for seed in range(50):
        rng = np.random.default_rng(seed)
        N = int(rng.integers(2, 13))
        for d in (1, 2):
            w = TimeSeries(rng.normal(size=(N + 1, d)))
            for p in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
                fast = pvar(w, p)
                slow = brute_force_pvar(w, p)
                if abs(fast - slow) > 1e-12 * max(1.0, abs(slow)):
                    ok = False
    report("variation dynamic program equals exhaustive search",
           ok, time.perf_counter() - t0, 30)


def test_second_level_additivity_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        N = int(rng.integers(4, 65))
        d = int(rng.integers(1, 5))
        w = TimeSeries(rng.normal(size=(N + 1, d)))
        W2 = lift(w).second_level.data
        winc = increments(w).data
        scale = float(np.max(np.abs(W2)))
        for l in range(1, N):
            got = W2[:l, l + 1:] - W2[:l, l, None] - W2[None, l, l + 1:]
            want = np.einsum("ku,mv->kmuv", winc[:l, l], winc[l, l + 1:])
            worst = max(worst, float(np.max(np.abs(got - want)))
                        / (1.0 + scale))
    report("second-level additivity identity on random series",
           worst <= 1e-12, time.perf_counter() - t0, 10)


def test_control_constructions_are_superadditive():
    t0 = time.perf_counter()
    ok = True
    for seed in range(20):
        rng = np.random.default_rng(200 + seed)
        w = TimeSeries(rng.normal(size=(17, 2)))
        base = pvar_control(w, 1.5)
        other = pvar_control(w, 2.5)
        candidates = [
            base,
            other,
            control_convex_map(base, lambda t: t ** 2),
            control_convex_map(base, lambda t: t ** 3),
            control_product(base, other, 0.6, 0.6),
        ]
        ok = ok and all(c.check_superadditive() for c in candidates)
    report("control constructions pass exhaustive superadditivity checks",
           ok, time.perf_counter() - t0, 10)


def test_first_order_germ_defect_bound():
    t0 = time.perf_counter()
    worst = 0.0
    N, d, m = 64, 2, 2
    for seed in range(34):
        rng = np.random.default_rng(300 + seed)
        f = tanh_fields(rng)
        w = random_walk(rng, N, d)
        x = solve(f, w, rng.normal(size=m))
        fc1 = f.cnb(1)
        fmat = np.stack([f.field_matrix(x.points[k]) for k in range(N + 1)])
        winc = increments(w).data
        germ = TriangularArray(np.einsum("kmd,kld->klm", fmat, winc)
                               * np.triu(np.ones((N + 1, N + 1)), 1)[:, :, None])
        for p in (1.1, 1.5, 1.9):
            omega_x = pvar_control(x, p)
            omega_fw = pvar_control(w, p)
            scaled = type(omega_fw)(TriangularArray(
                fc1 ** p * omega_fw.values.data))
            rep = check_sewing_bound(
                germ, SewingBudget(1 / p, 1 / p, omega_x, scaled))
            worst = max(worst, rep.worst_ratio)
    report("first-order germ defect within the explicit sewing budget "
           f"(worst ratio {worst:.3f})",
           worst <= 1.0 + 1e-9, time.perf_counter() - t0, 120)


def test_explicit_constants_reproduction():
    t0 = time.perf_counter()
    ok = constants(1.0, 1).C_pN == 4.0
    ok = ok and abs(constants(1.0, 10 ** 6).C_pN
                    - 4.0 * math.pi ** 2 / 6.0) <= 1e-3
    with mpmath.workdps(50):
        for p in (1.2, 1.5, 1.9, 2.0, 2.2, 2.6):
            for N in (32, 64):
                mp = mpmath.mpf(p)
                C = 2 ** (2 / mp) * mpmath.nsum(lambda n: n ** (-2 / mp), [1, N])
                K = 9 * 2 ** (6 * (1 - 1 / mp)) * max(
                    mpmath.mpf(1), 6 ** (1 - 1 / mp)
                    * 8 ** ((1 - 1 / mp) * (1 - 2 / mp)) * C ** (1 - 1 / mp))
                Kp = 3 * 2 ** (1 - 2 / mp) * (1 + K ** 2)
                L = 4 ** (mpmath.mpf(3) / 2 - 2 / mp) * 7 ** (2 - 3 / mp) * C
                ref = {
                    "C_pN": C,
                    "c_young": (4 * mpmath.e ** 2) ** mp
                               * (4 ** (mp - 1) * C ** mp + 1),
                    "K_p": K, "K_p_prime": Kp, "L_p": L,
                    "c_rough": 2 ** mp * mpmath.e ** (2 * mp)
                               * (L + K ** 2 + Kp) ** mp,
                }
                ct = constants(p, N)
                for key, want in ref.items():
                    got = getattr(ct, key)
                    if abs(got - float(want)) > 1e-12 * float(abs(want)):
                        ok = False
    report("explicit constants match an independent high-precision evaluation",
           ok, time.perf_counter() - t0, 30)


def test_first_order_certificates_hold():
    t0 = time.perf_counter()
    violations = 0
    for seed in range(34):
        for p in (1.2, 1.5, 1.9):
            rng = np.random.default_rng(400 + seed)
            f = tanh_fields(rng)
            w = random_walk(rng, 64, 2)
            xi = rng.normal(size=2)
            if not young_apriori(f, w, p, xi=xi).holds:
                violations += 1
            w2 = TimeSeries(w.points + np.cumsum(
                rng.normal(scale=0.02, size=w.points.shape), axis=0))
            xi2 = xi + rng.normal(scale=0.05, size=2)
            if not young_stability(f, (w, xi), (w2, xi2), p).holds:
                violations += 1
    report("first-order a priori and stability certificates hold on 100+ "
           "random instances each", violations == 0,
           time.perf_counter() - t0, 120)


def test_second_order_certificates_hold():
    t0 = time.perf_counter()
    violations = 0
    for seed in range(34):
        for p in (2.0, 2.2, 2.6):
            rng = np.random.default_rng(500 + seed)
            f = tanh_fields(rng)
            w = random_walk(rng, 32, 2)
            xi = rng.normal(size=2)
            cx, cI = rough_apriori(f, lift(w), p, xi=xi)
            violations += (not cx.holds) + (not cI.holds)
            w2 = TimeSeries(w.points + np.cumsum(
                rng.normal(scale=0.02, size=w.points.shape), axis=0))
            xi2 = xi + rng.normal(scale=0.05, size=2)
            if not rough_stability(f, (lift(w), xi), (lift(w2), xi2), p).holds:
                violations += 1
    report("second-order a priori and stability certificates hold on 100+ "
           "random instances each", violations == 0,
           time.perf_counter() - t0, 180)


def test_nonlinear_gronwall_bound_dominates():
    t0 = time.perf_counter()
    ok = True
    cases = [(C, kappa, rho, L)
             for C in (0.5, 1.0, 2.0) for kappa in (1.0, 2.0)
             for rho in (1.0, 2.0) for L in (0.5, 2.0)]
    seed = 600
    count = 0
    while count < 100:
        for C, kappa, rho, L in cases:
            rng = np.random.default_rng(seed + count)
            z = TimeSeries(np.cumsum(rng.normal(scale=0.3, size=(13, 2)),
                                     axis=0))
            omega = pvar_control(TimeSeries(rng.normal(size=(13, 1))), 1.0)
            inp = GronwallInput(z=z, omega=omega,
                                omega_tilde=pvar_control(z, rho),
                                C=C, kappa=kappa, rho=rho, L=L)
            bound = rough_gronwall_bound(inp)
            if bound < np.max(np.linalg.norm(z.points, axis=1)):
                ok = False
            count += 1
            if count >= 100:
                break
    report("nonlinear discrete Gronwall bound dominates the running maximum "
           "on 100 instances", ok, time.perf_counter() - t0, 30)


def test_residual_network_embedding_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(700 + seed)
        for m in (1, 2, 4):
            N = int(rng.integers(2, 17))
            thetas = rng.normal(scale=0.5, size=(N, m, m))
            y0 = rng.normal(size=m)
            y = resnet_forward(tanh_matvec, thetas, y0)
            f, w, x0 = embed_resnet(tanh_matvec, thetas, y0)
            x = solve(f, w, x0)
            worst = max(worst, float(np.max(np.abs(x.points[:, :m] - y))))
    report("network forward pass equals the projected driven solution",
           worst <= 1e-12, time.perf_counter() - t0, 10)


def test_random_walk_variation_scaling():
    t0 = time.perf_counter()
    r1, r3 = [], []
    for seed in range(32):
        rng = np.random.default_rng(800 + seed)
        vals = {}
        for N in (256, 1024):
            w = random_walk(rng, N, 1)
            vals[N] = (pvar(w, 1.0), pvar(w, 3.0))
        r1.append(vals[1024][0] / vals[256][0])
        r3.append(vals[1024][1] / vals[256][1])
    med1, med3 = float(np.median(r1)), float(np.median(r3))
    report("random-walk scaling: 1-variation grows, 3-variation saturates "
           f"(medians {med1:.2f}, {med3:.2f})",
           med1 >= 1.8 and med3 <= 1.2, time.perf_counter() - t0, 60)


def test_joint_rescaling_invariance():
    t0 = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(900)
    mats = rng.normal(scale=0.5, size=(2, 2, 2))
    w = random_walk(rng, 24, 2)
    xi = rng.normal(size=2)
    for base in (VectorFieldSystem.linear(mats),
                 VectorFieldSystem.activation("tanh", mats)):
        ref = solve(base, w, xi)
        for lam in (0.5, 2.0, 10.0):
            scaled = VectorFieldSystem.from_callables(
                base.num_fields, base.state_dim,
                [lambda x, mu=mu: base.eval_field(mu, x) / lam
                 for mu in range(base.num_fields)])
            got = solve(scaled, TimeSeries(lam * w.points), xi)
            worst = max(worst, float(np.max(np.abs(got.points - ref.points))))
    report("joint field/driver rescaling leaves the solution unchanged",
           worst <= 1e-12, time.perf_counter() - t0, 10)
