"""Coulomb friction field and its set-valued (Filippov) extension at zero slip.

For relative velocity ``u != 0`` the right-hand side is single valued::

    F(t, u) = -sigma u/|u| - V'(t) - u/k

(the last term only for the regularized family). At ``u = 0`` the admissible
derivatives form the closed disk of radius ``sigma`` centred at ``-V'(t)``.
"""

from dataclasses import dataclass, replace
from enum import Enum
import math

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SimParams:
    """Physical and numerical parameters for one simulation.

    Parameters
    ----------
    sigma : float
        Friction coefficient (acceleration units), must be positive.
    k : float or None
        Regularization index; ``None`` selects the unregularized system.
    eps_stick : float or None
        Capture radius on ``|u|`` for stick onset. Defaults to
        ``1e-9 * max(sigma, 1)``, capped at ``1e-4 * sigma``.
    event_tol : float
        Time tolerance for locating events.
    dt_max : float
        Maximum integrator step, also the stick-phase probing step.
    rtol, atol : float
        Local error tolerances of the slip-phase Runge-Kutta scheme.
    sample_dt : float
        Maximum spacing of recorded samples in dense trajectories.
    """

    sigma: float
    k: float | None = None
    eps_stick: float | None = None
    event_tol: float = 1e-12
    dt_max: float = 1.0 / 128
    rtol: float = 1e-10
    atol: float = 1e-12
    sample_dt: float = 1.0 / 4096

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be > 0, got {self.sigma!r}")
        if self.k is not None and not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"k must be a positive number or None, got {self.k!r}")
        if self.eps_stick is None:
            object.__setattr__(self, "eps_stick", min(1e-9 * max(self.sigma, 1.0), 1e-4 * self.sigma))
        if not (self.eps_stick > 0 and self.eps_stick < 1e-3 * self.sigma):
            raise ValueError("eps_stick must satisfy 0 < eps_stick < 1e-3*sigma")
        if not (0 < self.event_tol < self.dt_max):
            raise ValueError("event_tol must satisfy 0 < event_tol < dt_max")
        if not (self.rtol > 0 and self.atol > 0 and self.sample_dt > 0):
            raise ValueError("rtol, atol and sample_dt must be positive")

    @property
    def inv_k(self):
        return 0.0 if self.k is None else 1.0 / self.k

    def with_k(self, k):
        return replace(self, k=k)


class SetKind(str, Enum):
    SINGLETON = "singleton"
    DISK = "disk"


@dataclass(frozen=True)
class FilippovSet:
    kind: SetKind
    value: np.ndarray
    radius: float = 0.0

    def distance(self, v):
        d = float(np.hypot(*(np.asarray(v, dtype=float) - self.value)))
        return max(d - self.radius, 0.0)

    def contains(self, v, tol=0.0):
        return self.distance(v) <= tol


def _vec(u):
    u = np.asarray(u, dtype=float)
    if u.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {u.shape}")
    return u


def slip_field(t, u, params, profile):
    """Classical right-hand side off the switching line ``u = 0``."""
    u = _vec(u)
    r = math.hypot(u[0], u[1])
    if r == 0.0:
        raise DomainError("slip_field is undefined at u = 0; use filippov_set")
    return -params.sigma * u / r - profile.Vdot(t) - params.inv_k * u


def filippov_set(t, u, params, profile):
    u = _vec(u)
    if u[0] == 0.0 and u[1] == 0.0:
        # the -u/k term vanishes here, and F(t, 0) itself never enters
        return FilippovSet(SetKind.DISK, -profile.Vdot(t), params.sigma)
    return FilippovSet(SetKind.SINGLETON, slip_field(t, u, params, profile), 0.0)


def residual_distance(t, u, udot, params, profile):
    """Distance from ``udot`` to the admissible set at ``(t, u)``."""
    return filippov_set(t, u, params, profile).distance(udot)


def stick_admissible(t, params, profile):
    """Whether the particle can rest on the plane at time ``t``.

    Ties ``|V'(t)| == sigma`` count as admissible (closed disk).
    """
    a = profile.Vdot(t)
    return bool(math.hypot(a[0], a[1]) <= params.sigma)


def friction_force(u, sigma):
    u = np.asarray(u, dtype=float)
    r = np.linalg.norm(u, axis=-1, keepdims=True)
    if np.any(r == 0):
        raise DomainError("friction force is set-valued at u = 0")
    # trailing axis so a per-vector sigma broadcasts against (..., 2)
    return -np.asarray(sigma, dtype=float)[..., None] * u / r


def monotonicity_gap(v, w, sigma):
    """Inner product ``(v - w, Phi(v) - Phi(w))`` with ``Phi(u) = -sigma u/|u|``.

    Accepts single 2-vectors or stacks of shape ``(..., 2)``; ``sigma`` may be
    a scalar or an array matching the stack shape. The friction
    force is monotone, so the result is never positive.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    gap = np.sum((v - w) * (friction_force(v, sigma) - friction_force(w, sigma)), axis=-1)
    return float(gap) if gap.ndim == 0 else gap
