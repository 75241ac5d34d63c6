"""Acceptance gate. Each test records one PASS/FAIL line shown in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py`` (or ``python tests/test_acceptance.py``).
"""

import math

import numpy as np
import pytest

from oracles import release_time_single_harmonic, rk4_regularized
from stickslip import (
    EventKind,
    SimParams,
    find_periodic,
    invariant_radius,
    map_contraction_factor,
    monotonicity_gap,
    poincare_map,
    simulate,
    sup_distance,
)

SQRT_HALF = math.sqrt(0.5)


def test_c1_stick_regime(single, criterion):
    rep = find_periodic(SimParams(7.0), single)
    u = rep.trajectory.u
    ok = (rep.converged and np.all(rep.fixed_point == 0.0) and rep.residual == 0.0
          and not rep.trajectory.events and np.all(u == 0.0))
    criterion(1, ok, f"u* = {rep.fixed_point.tolist()}, residual {rep.residual}, "
                     f"{len(rep.trajectory.events)} events")


def test_c2_monotonicity(criterion):
    rng = np.random.default_rng(20240501)
    v = rng.normal(size=(100_000, 2)) * rng.lognormal(sigma=2.0, size=(100_000, 1))
    w = rng.normal(size=(100_000, 2)) * rng.lognormal(sigma=2.0, size=(100_000, 1))
    sigma = rng.uniform(0.01, 10.0, size=100_000)
    gap = monotonicity_gap(v, w, sigma)
    worst = float(gap.max())
    criterion(2, worst <= 1e-12, f"max gap over 1e5 pairs {worst:.3e} <= 1e-12")


@pytest.mark.parametrize("k", [10.0, 100.0, None])
def test_c3_contraction(single, criterion, k):
    rng = np.random.default_rng(3 if k is None else int(k))
    params = SimParams(0.3, k=k)
    # pairs well inside the invariant ball of k = 10
    u0 = rng.uniform(-3.0, 3.0, size=(50, 2))
    w0 = rng.uniform(-3.0, 3.0, size=(50, 2))
    factors = [map_contraction_factor(a, b, params, single) for a, b in zip(u0, w0)]
    bound = 1.0 if k is None else math.exp(-1.0 / k)
    worst = max(factors)
    criterion(3, worst <= bound + 1e-6, f"k={k}: max factor {worst:.6f} <= {bound:.6f} + 1e-6")


def test_c4_ball_invariance(single, criterion):
    params = SimParams(0.3, k=10.0)
    R = invariant_radius(10.0, single)
    angles = np.linspace(0.0, 2.0 * math.pi, 100, endpoint=False)
    images = [poincare_map(R * np.array([math.cos(a), math.sin(a)]), params, single) for a in angles]
    margin = R - max(math.hypot(*x) for x in images)
    criterion(4, margin > 0.0, f"R - max|T(u0)| = {margin:.4f} > 0 (R = 10 pi)")


def test_c5_periodic_orbit(orbit_k100, criterion):
    rep = orbit_k100
    traj = rep.trajectory
    gap = math.hypot(*(traj.u[-1] - traj.u[0]))
    ok = rep.converged and rep.residual <= 1e-10 and gap <= 1e-9
    criterion(5, ok, f"|T(u*)-u*| = {rep.residual:.2e} <= 1e-10, |u(1)-u(0)| = {gap:.2e} <= 1e-9")


def test_c6_a_priori_bounds(orbit_k100, criterion):
    b = orbit_k100.bound_report
    bound = math.pi * SQRT_HALF
    sup_ok = (not b.touched_zero) or b.sup_u <= bound
    eq9_ok = b.L2_udot <= bound + 1e-6
    eq10_ok = 0.3 * b.L1_u <= 0.35355 * b.L2_udot + 1e-6
    criterion(6, sup_ok and eq9_ok and eq10_ok,
              f"touched_zero={b.touched_zero} sup|u| {b.sup_u:.5f} <= {bound:.5f}; "
              f"L2(u') {b.L2_udot:.5f} <= {bound:.5f}; "
              f"sigma L1(u) {0.3 * b.L1_u:.5f} <= {0.35355 * b.L2_udot:.5f}")


def test_c7_energy_identity(orbit_k100, criterion):
    err = orbit_k100.bound_report.energy_identity_max_err
    criterion(7, err <= 1e-6, f"max energy residual {err:.2e} <= 1e-6")


def test_c8_k_convergence(orbit_k1e3, orbit_k1e4, orbit_filippov, criterion):
    d_3_f = sup_distance(orbit_k1e3.trajectory, orbit_filippov.trajectory)
    d_3_4 = sup_distance(orbit_k1e3.trajectory, orbit_k1e4.trajectory)
    d_4_f = sup_distance(orbit_k1e4.trajectory, orbit_filippov.trajectory)
    monotone = d_4_f <= 1.1 * d_3_f
    ok = d_3_4 <= 1e-4 and d_4_f <= 1e-4 and monotone
    criterion(8, ok, f"sup|u_1e3 - u_1e4| = {d_3_4:.2e}, sup|u_1e4 - u_F| = {d_4_f:.2e} (<= 1e-4), "
                     f"distance to u_F {d_3_f:.2e} -> {d_4_f:.2e} monotone={monotone}")


def test_c9_oracle_equivalence(single, criterion):
    traj = simulate([1.0, 0.0], 0.0, 2.0, SimParams(0.3), single)
    ref = rk4_regularized(np.array([1.0, 0.0]), 0.0, 2.0, 0.3, 1e6,
                          np.zeros((1, 2)), np.array([[0.5, 0.0]]), 1e-6, 1000)
    diff = float(np.max(np.linalg.norm(traj.at(ref[:, 0]) - ref[:, 1:], axis=1)))
    criterion(9, diff <= 1e-5, f"sup difference to k=1e6 RK4 oracle {diff:.2e} <= 1e-5")


def test_c10_release_time(single, criterion):
    traj = simulate([0.0, 0.0], 0.24, 0.3, SimParams(0.3), single)
    releases = [e for e in traj.events if e.kind is EventKind.STICK_RELEASE]
    t_ref = release_time_single_harmonic(0.5, 0.3, 0.25, 0.3)
    err = abs(releases[0].t - t_ref) if releases else math.inf
    criterion(10, err <= 1e-9, f"t* = {releases[0].t if releases else None!r}, "
                               f"oracle {t_ref!r}, |diff| = {err:.1e} <= 1e-9")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
