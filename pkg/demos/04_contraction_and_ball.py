"""Two structural facts behind the periodic solution.

1. Friction -sigma u/|u| is monotone, so two motions never drift apart; with
   the extra damping -u/k they approach each other at least like exp(-t/k).
2. With damping, the disk of radius k sup|V'| is mapped into itself.
"""

import math

import numpy as np

from stickslip import (
    ForcingProfile,
    SimParams,
    contraction_bound,
    invariant_radius,
    map_contraction_factor,
    poincare_map,
)

table = ForcingProfile(sin_coeffs=[[0.5, 0.0]])
rng = np.random.default_rng(0)

for k in (10.0, 100.0, None):
    params = SimParams(sigma=0.3, k=k)
    pairs = rng.uniform(-3.0, 3.0, size=(20, 2, 2))
    worst = max(map_contraction_factor(u, w, params, table) for u, w in pairs)
    print(f"k = {k!s:>5}: worst observed factor {worst:.6f}, guaranteed {contraction_bound(params):.6f}")

k = 10.0
R = invariant_radius(k, table)
angles = np.linspace(0.0, 2 * math.pi, 12, endpoint=False)
images = [poincare_map(R * np.array([math.cos(a), math.sin(a)]), SimParams(0.3, k=k), table) for a in angles]
print(f"\ndisk radius R = {R:.4f}; images of boundary points have |T(u)| <= {max(map(np.linalg.norm, images)):.4f}")
