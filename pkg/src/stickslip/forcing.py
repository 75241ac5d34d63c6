"""Prescribed plane velocity as a 1-periodic truncated Fourier series.

The plane velocity is

    V(t) = a_0 + sum_n a_n cos(2 pi n t) + b_n sin(2 pi n t),

with 2-vector coefficients. Time is normalized so that the period is 1.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

TWO_PI = 2.0 * math.pi

#: sample count used before refining the sup norm of the acceleration
SUP_SAMPLES = 4096
SUP_TOL = 1e-12


class Norms(NamedTuple):
    sup_Vdot: float
    L2_Vdot: float
    L2_V: float
    trivial: bool


def _as_coeffs(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2))
    arr = arr.reshape(-1, 2) if arr.ndim == 1 and arr.size == 2 else arr
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must be a sequence of 2-vectors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class ForcingProfile:
    """Plane velocity V(t) with period 1.

    Parameters
    ----------
    cos_coeffs : array_like, shape (N, 2)
        ``a_n`` for n = 1..N, coefficients of ``cos(2 pi n t)``.
    sin_coeffs : array_like, shape (M, 2)
        ``b_n`` for n = 1..M, coefficients of ``sin(2 pi n t)``.
    mean : array_like, shape (2,)
        Constant term ``a_0``.

    The two coefficient lists are zero-padded to a common length. Instances
    are immutable; coefficient arrays are marked read-only.
    """

    cos_coeffs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    sin_coeffs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    mean: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        a = _as_coeffs(self.cos_coeffs, "cos_coeffs")
        b = _as_coeffs(self.sin_coeffs, "sin_coeffs")
        n = max(len(a), len(b))
        a = np.vstack([a, np.zeros((n - len(a), 2))])
        b = np.vstack([b, np.zeros((n - len(b), 2))])
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        if not np.all(np.isfinite(mean)):
            raise ValueError("mean contains non-finite entries")
        for arr in (a, b, mean):
            arr.setflags(write=False)
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)
        object.__setattr__(self, "mean", mean)

    def __eq__(self, other):
        if not isinstance(other, ForcingProfile):
            return NotImplemented
        return (
            np.array_equal(self.mean, other.mean)
            and np.array_equal(self.cos_coeffs, other.cos_coeffs)
            and np.array_equal(self.sin_coeffs, other.sin_coeffs)
        )

    def __hash__(self):
        return hash((self.mean.tobytes(), self.cos_coeffs.tobytes(), self.sin_coeffs.tobytes()))

    @property
    def n_harmonics(self):
        return len(self.cos_coeffs)

    @cached_property
    def _omegas(self):
        return TWO_PI * np.arange(1, self.n_harmonics + 1)

    def V(self, t):
        """Plane velocity at time(s) ``t``; returns shape ``t.shape + (2,)``."""
        t = np.asarray(t, dtype=float)
        phase = np.multiply.outer(t, self._omegas)
        return self.mean + np.cos(phase) @ self.cos_coeffs + np.sin(phase) @ self.sin_coeffs

    def Vdot(self, t):
        """Plane acceleration, the exact term-by-term derivative of :meth:`V`."""
        t = np.asarray(t, dtype=float)
        w = self._omegas
        phase = np.multiply.outer(t, w)
        return (np.cos(phase) * w) @ self.sin_coeffs - (np.sin(phase) * w) @ self.cos_coeffs

    def Vddot(self, t):
        t = np.asarray(t, dtype=float)
        w = self._omegas
        phase = np.multiply.outer(t, w)
        return -(np.sin(phase) * w**2) @ self.sin_coeffs - (np.cos(phase) * w**2) @ self.cos_coeffs

    @cached_property
    def _terms(self):
        return [
            (float(w), float(a[0]), float(a[1]), float(b[0]), float(b[1]))
            for w, a, b in zip(self._omegas, self.cos_coeffs, self.sin_coeffs)
            if a.any() or b.any()
        ]

    @cached_property
    def vdot_xy(self):
        """Scalar callable ``t -> (ax, ay)`` for the integrator's inner loop."""
        terms = self._terms
        cos, sin = math.cos, math.sin

        def vdot(t):
            x = y = 0.0
            for w, ax, ay, bx, by in terms:
                c = cos(w * t)
                s = sin(w * t)
                x += w * (bx * c - ax * s)
                y += w * (by * c - ay * s)
            return x, y

        return vdot

    @cached_property
    def vddot_xy(self):
        terms = self._terms
        cos, sin = math.cos, math.sin

        def vddot(t):
            x = y = 0.0
            for w, ax, ay, bx, by in terms:
                c = cos(w * t)
                s = sin(w * t)
                x -= w * w * (bx * s + ax * c)
                y -= w * w * (by * s + ay * c)
            return x, y

        return vddot

    @cached_property
    def _norms(self):
        a, b, w = self.cos_coeffs, self.sin_coeffs, self._omegas
        energy = np.sum(a**2, axis=1) + np.sum(b**2, axis=1)
        L2_V = math.sqrt(float(self.mean @ self.mean) + 0.5 * float(energy.sum()))
        L2_Vdot = math.sqrt(0.5 * float(np.sum(w**2 * energy)))
        sup = _sup_norm(lambda t: np.linalg.norm(self.Vdot(t), axis=-1))
        return Norms(sup_Vdot=sup, L2_Vdot=L2_Vdot, L2_V=L2_V, trivial=(sup == 0.0))

    def norms(self):
        return self._norms

    @property
    def trivial(self):
        """True when the plane does not accelerate, so u is constant."""
        return self._norms.trivial


def _sup_norm(fun):
    grid = np.arange(SUP_SAMPLES) / SUP_SAMPLES
    vals = fun(grid)
    best = float(vals.max())
    if best == 0.0:
        return 0.0
    h = 1.0 / SUP_SAMPLES
    # refine the few largest local maxima; ties between peaks are common for symmetric forcing
    is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(vals[peaks])[::-1][:4]]
    scalar = lambda t: -float(fun(np.array([t]))[0])
    for i in peaks:
        t = grid[i]
        left, right = -scalar(t - h), -scalar(t + h)
        if not (left < vals[i] and right < vals[i]):
            continue
        res = minimize_scalar(scalar, bracket=(t - h, t, t + h), method="golden", tol=SUP_TOL)
        best = max(best, -float(res.fun))
    return best


def eval_V(profile, t):
    return profile.V(t)


def eval_Vdot(profile, t):
    return profile.Vdot(t)


def norms(profile):
    """Sup norm of V', and the L2(0,1) norms of V' and V (exact, via Parseval)."""
    return profile.norms()
