"""Regularized family ``u' = F(t, u) - u/k`` and its time-1 (Poincare) map."""

import math

import numpy as np

from .errors import DomainError
from .integrator import simulate

# relative slack for points placed exactly on the invariant sphere
_BALL_SLACK = 1e-12


def invariant_radius(k, profile):
    """Radius ``k * sup|V'|`` of the ball that the regularized flow maps into itself."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    return k * profile.norms().sup_Vdot


def contraction_bound(params):
    """Guaranteed Lipschitz constant of the time-1 map: ``exp(-1/k)``, or 1 without k."""
    return 1.0 if params.k is None else math.exp(-1.0 / params.k)


def poincare_map(u0, params, profile):
    """Advance ``u0`` from t = 0 to t = 1.

    With ``params.k`` set, ``u0`` must lie in the closed invariant ball.
    """
    u0 = np.asarray(u0, dtype=float).reshape(2)
    if params.k is not None:
        R = invariant_radius(params.k, profile)
        if math.hypot(*u0) > R * (1 + _BALL_SLACK):
            raise DomainError(f"|u0| = {math.hypot(*u0)!r} exceeds the invariant radius {R!r}")
    return simulate(u0, 0.0, 1.0, params, profile, dense=False).final.u


def map_contraction_factor(u0, w0, params, profile):
    """Observed ratio ``|T(u0) - T(w0)| / |u0 - w0|`` for the time-1 map."""
    u0 = np.asarray(u0, dtype=float).reshape(2)
    w0 = np.asarray(w0, dtype=float).reshape(2)
    d0 = math.hypot(*(u0 - w0))
    if d0 == 0.0:
        raise DomainError("contraction factor needs two distinct points")
    Tu = poincare_map(u0, params, profile)
    Tw = poincare_map(w0, params, profile)
    return math.hypot(*(Tu - Tw)) / d0
