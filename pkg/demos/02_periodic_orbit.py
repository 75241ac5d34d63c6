"""The steady periodic motion and the bounds it has to respect.

After transients die out the block settles on a 1-periodic relative velocity.
We find it as a fixed point of the time-1 map, first with a weak linear
damping u/k (k = 100) that makes the map a contraction, then without it.
"""

import math

from stickslip import ForcingProfile, SimParams, find_periodic

table = ForcingProfile(sin_coeffs=[[0.5, 0.0]])

damped = find_periodic(SimParams(sigma=0.3, k=100.0), table, fp_tol=1e-10)
print(f"k = 100: u* = {damped.fixed_point}, |T(u*) - u*| = {damped.residual:.1e} "
      f"after {damped.iterations} map evaluations")
print(f"         crosses zero at t = {[round(t, 4) for t in damped.trajectory.crossings]}")

plain = find_periodic(SimParams(sigma=0.3), table, fp_tol=1e-10)
print(f"no k:    u* = {plain.fixed_point}, |T(u*) - u*| = {plain.residual:.1e}")
print(f"         reached via k = {plain.k_path[0][0]:g} ... {plain.k_path[-1][0]:g}")

# the bounds every periodic orbit satisfies, checked on the damped one
b = damped.bound_report
print("\nbound                          value      limit")
print(f"sup|u|                       {b.sup_u:8.5f}   {b.rho:8.5f}")
print(f"||u'||_L2                    {b.L2_udot:8.5f}   {b.L2_Vdot:8.5f}")
print(f"sigma ||u||_L1               {0.3 * b.L1_u:8.5f}   {b.L2_V * b.L2_udot:8.5f}")
print(f"energy identity residual     {b.energy_identity_max_err:8.1e}")
print("all satisfied:", b.all_ok)
print(f"(pi / sqrt 2 = {math.pi / math.sqrt(2):.5f})")

# strong friction: the block never moves relative to the table
stuck = find_periodic(SimParams(sigma=7.0), table)
print("\nsigma = 7:", stuck.fixed_point, "events:", len(stuck.trajectory.events))
