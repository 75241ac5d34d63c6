"""A block on a shaking table: when does it stick, when does it slide?

The table moves with velocity V(t) = (0.5 sin 2 pi t, 0), so its acceleration
peaks at pi. With friction level sigma = 0.3 the block can only hold on while
|V'(t)| <= 0.3, which happens in short windows around t = 1/4 and t = 3/4.
"""

import math

import numpy as np

from stickslip import ForcingProfile, SimParams, simulate

table = ForcingProfile(sin_coeffs=[[0.5, 0.0]])
params = SimParams(sigma=0.3)

# start at rest inside the first stick window
traj = simulate([0.0, 0.0], 0.24, 1.24, params, table)
print(f"{len(traj)} samples, {int(traj.stick.sum())} of them stuck")
for event in traj.events:
    print(f"  {event.kind.value:<14} t = {event.t:.12f}")

# the release time has a closed form: pi |cos 2 pi t| = sigma
t_star = math.acos(-0.3 / math.pi) / (2 * math.pi)
print(f"closed-form release  t = {t_star:.12f}")

# between sticks the relative velocity passes straight through zero
print("zero crossings without sticking:", [round(t, 6) for t in traj.crossings])

# a table that shakes in two directions makes the velocity leave the x-axis
wobble = ForcingProfile(cos_coeffs=[[0.0, 0.4], [0.1, 0.0]], sin_coeffs=[[0.5, 0.0], [0.0, 0.15]])
traj2 = simulate([0.3, 0.1], 0.0, 2.0, SimParams(sigma=2.5), wobble)
print("\ntwo-dimensional shaking, sigma = 2.5")
for event in traj2.events:
    extra = "" if event.release_dir is None else f" leaving along {np.round(event.release_dir, 4).tolist()}"
    print(f"  {event.kind.value:<14} t = {event.t:.6f}{extra}")
print("u(2) =", traj2.final.u)
