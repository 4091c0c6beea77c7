"""The twelve acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per
criterion as it executes; the lines are repeated in the terminal summary.
"""

import math

import mpmath
import numpy as np
from conftest import (
    canonical_model,
    concentrated_instance,
    random_concentrated_instance,
    record_criterion,
    single_shell,
)

from kirchhoff_lifespan import (
    AffinePhi,
    ClassKParams,
    CoefficientPath,
    GevreyParams,
    check_class_membership,
    compare_bounds,
    compute_data_constants,
    compute_K,
    direct_solve,
    energy_certificate,
    fixed_point_solve,
    gevrey_bound,
    lifespan_probe,
    oscillating_path,
    solve_mode,
    theta_map,
)
from kirchhoff_lifespan.bounds import Verdict
from kirchhoff_lifespan.kirchhoff import Status
from kirchhoff_lifespan.linear import uniform_grid

# every direct simulation run below, for the domain-bound criterion
SIMULATIONS = {}


def simulate(name, model, profile, horizon, step):
    res = direct_solve(model, profile, horizon, step)
    SIMULATIONS[name] = (res, compute_data_constants(model, profile).lam)
    return res


def test_01_first_integral_conservation():
    res = simulate("canonical T=20", canonical_model(), single_shell(), 20.0, 1e-3)
    drift = np.abs(res.hamiltonian_trace - 1.5) / 1.5
    worst = float(np.max(drift / (1 + res.times)))
    ok = res.status is Status.COMPLETED and res.times[-1] == 20.0 and bool(np.all(drift <= 1e-8 * (1 + res.times)))
    assert record_criterion(1, ok, f"first integral: max |H-3/2|/(3/2)/(1+t) = {worst:.2e} (<= 1e-8)")


def test_02_linear_mode_exactness():
    path = CoefficientPath.constant(1.0, [0.0, 2 * math.pi])
    traj = solve_mode(path, 1.0, 1.0, 0.0, 1e-3)
    err = float(np.max(np.abs(traj.w - np.cos(traj.times))))
    errs = []
    for h in (0.1, 0.05, 0.025, 0.0125):
        t = solve_mode(path, 1.0, 1.0, 0.0, h)
        errs.append(float(np.max(np.abs(t.w - np.cos(t.times)))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    # the same check through the nonlinear driver with constant phi
    res = simulate("constant phi", AffinePhi(1.0, 0.0, 1.0), single_shell(), 2 * math.pi, 1e-3)
    err_direct = float(np.max(np.abs(res.w[:, 0] - np.cos(res.times))))
    ok = err <= 1e-8 and err_direct <= 1e-8 and bool(np.all(orders >= 3.5))
    assert record_criterion(2, ok, f"cos t on [0, 2pi]: max error {err:.2e} (direct {err_direct:.2e}), "
                                   f"observed orders {np.round(orders, 2).tolist()} (>= 3.5)")


def test_03_classical_bound():
    rep = compare_bounds(canonical_model(), single_shell(), GevreyParams(2.0, 6.0))
    ok = abs(rep.classical - 0.125) <= 1e-12
    assert record_criterion(3, ok, f"classical bound = {rep.classical!r} (exact 0.125)")


def test_04_gevrey_bound():
    rep = compare_bounds(canonical_model(), single_shell(), GevreyParams(2.0, 6.0))
    mpmath.mp.dps = 50
    nu0, big_m, lip, s, eta = (mpmath.mpf(x) for x in (1, "2.5", 1, 2, 6))
    pair = mpmath.exp(6)
    oracle = (min(nu0, 1) / max(big_m, 1) * mpmath.exp(-2 * big_m / nu0) / (2 * s * lip)
              * (nu0 * eta - 2 * big_m) / pair) ** (s / (s + 1))
    err = abs(rep.gevrey - float(oracle)) / float(oracle)
    ok = err <= 1e-10
    assert record_criterion(4, ok, f"Gevrey bound = {rep.gevrey:.10e}, 50-digit oracle {float(oracle):.10e}, "
                                   f"rel. error {err:.1e}")


def test_05_bound_saturation_identity():
    rng = np.random.default_rng(20240501)
    worst = 0.0
    for _ in range(100):
        nu0 = rng.uniform(0.1, 5.0)
        big_m = nu0 + rng.uniform(0.0, 5.0)
        lip = 10 ** rng.uniform(-3, 3)
        s = rng.uniform(1.05, 6.0)
        eta = 2 * big_m / nu0 + rng.uniform(0.01, 20.0)
        pair = 10 ** rng.uniform(-3, 4)
        t = gevrey_bound(nu0, big_m, lip, s, eta, pair)
        k = compute_K(nu0, big_m, lip, s, t, pair)
        # T = [(nu0 eta - 2M) T^((s+1)/s) / (s K(T))]^(s/(s+1))
        rhs = ((nu0 * eta - 2 * big_m) * t ** ((s + 1) / s) / (s * k)) ** (s / (s + 1))
        worst = max(worst, abs(rhs - t) / t)
    ok = worst <= 1e-10
    assert record_criterion(5, ok, f"saturation identity over 100 random tuples: worst rel. error {worst:.1e}")


def test_06_route_agreement():
    rng = np.random.default_rng(6)
    agree, verdicts = 0, []
    for _ in range(20):
        model, prof = random_concentrated_instance(rng)
        const = compute_data_constants(model, prof)
        eta = float(rng.uniform(2.02 * const.big_m / model.nu0, 40.0))
        rep = compare_bounds(model, prof, GevreyParams(2.0, eta))
        by_threshold = eta > rep.eta_threshold
        direct = rep.gevrey > rep.classical
        agree += by_threshold == direct
        verdicts.append(rep.verdict)
    larger = sum(v is Verdict.GEVREY_STRICTLY_LARGER for v in verdicts)
    ok = agree == 20
    assert record_criterion(6, ok, f"threshold vs direct comparison agree in {agree}/20 cases "
                                   f"({larger} Gevrey-larger, {20 - larger} classical-geq)")


def test_07_energy_certificate():
    nu0, big_m, q, horizon = 1.0, 2.0, 1.5, 1.0
    k = (big_m - nu0) / 2
    params = ClassKParams(nu0, big_m, k, horizon, q)
    path = oscillating_path(nu0, big_m, q, horizon)
    g = GevreyParams(2.0, k / (q - 1) + 2 * big_m / nu0 + 1.0)
    parts, ok = [], True
    for r in (1.0, 10.0, 100.0):
        cert = energy_certificate(path, params, r, 1.0, 0.0, g, 0.0, min(1e-3, 0.02 / r))
        ok &= cert.max_energy_increase <= 1e-6 and cert.interval_bound_ratio <= 1 + 1e-6 and cert.k_bound_ok
        parts.append(f"r={r:g}: dE/E<={cert.max_energy_increase:.1e}, ratio {cert.interval_bound_ratio:.1e}, "
                     f"k-margin {cert.k_bound_margin:.2f}")
    assert record_criterion(7, ok, "certificate at K=(M-nu0)/2; " + "; ".join(parts))


def test_08_class_checker():
    nu0, big_m, q, horizon = 1.0, 2.0, 1.5, 1.0
    edge = (big_m - nu0) / 2
    path = oscillating_path(nu0, big_m, q, horizon)
    accept = check_class_membership(path, ClassKParams(nu0, big_m, edge * 1.01, horizon, q))
    reject = check_class_membership(path, ClassKParams(nu0, big_m, edge * 0.9, horizon, q))
    # true worst point of |c'| / envelope: |cos theta| = 1
    theta = (horizon - reject.location) ** (1 - q) / (q - 1)
    location_ok = reject.kind == "slope" and abs(math.cos(theta)) > 0.99

    rng = np.random.default_rng(8)
    params = ClassKParams(nu0, big_m, edge, horizon, q)
    pairs_ok = 0
    for _ in range(50):
        c1, c2 = (oscillating_path(nu0, big_m, q, horizon, ratio=2e-3,
                                   amplitude=float(rng.uniform(0.1, 1.0)),
                                   slowdown=float(rng.uniform(1.0, 3.0)),
                                   phase=float(rng.uniform(0, 2 * math.pi))) for _ in range(2))
        members = check_class_membership(c1, params).ok and check_class_membership(c2, params).ok
        lam = float(rng.uniform())
        mix = CoefficientPath(c1.times, lam * c1.values + (1 - lam) * c2.values)
        convex = check_class_membership(mix, params).ok
        i, j = np.sort(rng.integers(0, c1.times.size - 1, size=(2, 500)), axis=0)
        keep = i < j
        bound = params.modulus(c1.times[i[keep]], c1.times[j[keep]])
        modulus = all(np.all(np.abs(c.values[j[keep]] - c.values[i[keep]]) <= bound * (1 + 1e-9) + 1e-12)
                      for c in (c1, c2, mix))
        pairs_ok += members and convex and modulus
    ok = accept.ok and not reject.ok and location_ok and pairs_ok == 50
    assert record_criterion(8, ok, f"accepts at 1.01x, rejects at 0.9x (worst {reject.worst_violation:.3f} "
                                   f"at t={reject.location:.4f}); modulus + convexity on {pairs_ok}/50 pairs")


def test_09_theta_closed_form():
    path = CoefficientPath.constant(1.0, uniform_grid(2 * math.pi, 1e-2))
    out = theta_map(canonical_model(), 1.5, single_shell(), path, 1e-3)
    err = float(np.max(np.abs(out.values - (1 + np.cos(path.times) ** 2))))
    assert record_criterion(9, err <= 1e-6, f"Theta(1) vs 1 + cos^2 t: sup error {err:.2e} (<= 1e-6)")


def test_10_fixed_point_vs_direct():
    model, prof = canonical_model(), single_shell(1.0, 0.1)
    res = fixed_point_solve(model, prof, 1.0, 1e-8, 50, 1e-3)
    SIMULATIONS["fixed-point cross-check"] = (res.direct, compute_data_constants(model, prof).lam)
    ok = res.converged and len(res.distances) <= 50 and res.direct_gap <= 1e-6
    assert record_criterion(10, ok, f"converged={res.converged} in {len(res.distances)} iterations, "
                                    f"gap to direct solve {res.direct_gap:.1e} (<= 1e-6)")


def test_12_lifespan_probes():
    canon = lifespan_probe(canonical_model(), single_shell(), 0.125)
    model, prof = concentrated_instance()
    rep = compare_bounds(model, prof, GevreyParams(2.0, 20.0))
    conc = lifespan_probe(model, prof, rep.gevrey)
    # keep the probe trajectories for the domain-bound criterion
    simulate("probe canonical", canonical_model(), single_shell(), 0.125, 1e-3)
    simulate("probe concentrated", model, prof, rep.gevrey, 1e-3)
    ok = (canon.reached and conc.reached and math.isfinite(canon.max_e32) and math.isfinite(conc.max_e32)
          and rep.gevrey > rep.classical)
    assert record_criterion(12, ok, f"canonical reaches 0.125 (max E_3/2 {canon.max_e32:.3g}); concentrated "
                                    f"reaches Gevrey bound {rep.gevrey:.4f} > classical {rep.classical:.4f}")


def test_11_domain_bound_across_runs():
    # runs last among the numbered criteria so every simulation above is included
    for name, model, prof, horizon in (
        ("canonical T=20", canonical_model(), single_shell(), 20.0),
        ("constant phi", AffinePhi(1.0, 0.0, 1.0), single_shell(), 2 * math.pi),
    ):
        if name not in SIMULATIONS:
            simulate(name, model, prof, horizon, 1e-3)
    if "fixed-point cross-check" not in SIMULATIONS:
        model, prof = canonical_model(), single_shell(1.0, 0.1)
        SIMULATIONS["fixed-point cross-check"] = (direct_solve(model, prof, 1.0, 1e-3),
                                                  compute_data_constants(model, prof).lam)
    if "probe concentrated" not in SIMULATIONS:
        model, prof = concentrated_instance()
        simulate("probe concentrated", model, prof, compare_bounds(model, prof, GevreyParams(2.0, 20.0)).gevrey, 1e-3)
    excess = {name: float(np.max(res.grad_trace) - lam) for name, (res, lam) in SIMULATIONS.items()}
    worst = max(excess.values())
    ok = worst <= 1e-8
    assert record_criterion(11, ok, f"max(||grad u||^2 - Lambda) = {worst:.2e} over {len(excess)} runs (<= 1e-8)")
