"""Event-driven integration of the dry-friction system.

The relative velocity alternates between two regimes:

* slip (``u != 0``): the field is smooth and is integrated with an adaptive
  Dormand-Prince 5(4) scheme with dense output;
* stick (``u == 0``): ``u`` stays exactly zero while ``|V'(t)| <= sigma``.

Transitions are located as roots of ``|u|^2 - eps^2`` (slip to zero) and
``|V'|^2 - sigma^2`` (stick release). A trajectory that reaches zero where
sticking is not admissible crosses through the origin and is re-emitted along
:func:`release_direction`.

Accuracy of the generalized derivative: a central difference (step 1e-7) of
:meth:`Trajectory.at` lies within 1e-7 of the admissible set at samples more
than ``4 * sample_dt`` from a switching time, and within 1e-5 closer in. The
looser bound covers the last and first instants of slip, where the velocity
direction turns quickly. Stick rows at a release time
may exceed the threshold by ``event_tol * sup|V''|``, since the release is
placed at the upper end of the bisection bracket.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import DomainError, NonFiniteStateError, StiffnessError
from .forcing import ForcingProfile
from .friction import SimParams

__all__ = [
    "Mode",
    "EventKind",
    "State",
    "Event",
    "Trajectory",
    "simulate",
    "release_direction",
]

H_MIN = 1e-14
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0

# Dormand-Prince 5(4)
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = -71 / 57600, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40
# Shampine's continuous extension; rows are stages (stage 2 has zero weight)
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = _GL_X.tolist()
_GL_W = _GL_W.tolist()

# scan points inside each accepted step for a dip of |u| below eps_stick
_SCAN = (0.25, 0.5, 0.75, 1.0)


class Mode(str, Enum):
    SLIP = "slip"
    STICK = "stick"


class EventKind(str, Enum):
    STICK_ONSET = "stick_onset"
    STICK_RELEASE = "stick_release"


@dataclass(frozen=True)
class State:
    t: float
    u: np.ndarray
    mode: Mode


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t: float
    release_dir: tuple | None = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled generalized solution.

    Samples are ordered by time. Times repeat only at switching points, where
    the two rows carry the left and right limits of ``udot`` (and of the mode
    at stick onset/release). ``event_rows[i]`` is the row index at which
    ``events[i]`` takes effect. ``crossings`` lists times at which the
    solution passed through ``u = 0`` without sticking.
    """

    t: np.ndarray
    u: np.ndarray
    udot: np.ndarray
    stick: np.ndarray
    events: tuple
    event_rows: tuple
    crossings: tuple
    params: SimParams
    profile: ForcingProfile

    def __post_init__(self):
        for arr in (self.t, self.u, self.udot, self.stick):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.t)

    @property
    def modes(self):
        return [Mode.STICK if s else Mode.SLIP for s in self.stick]

    @property
    def samples(self):
        return [State(float(t), u, Mode.STICK if s else Mode.SLIP)
                for t, u, s in zip(self.t, self.u, self.stick)]

    @property
    def final(self):
        return State(float(self.t[-1]), self.u[-1].copy(), Mode.STICK if self.stick[-1] else Mode.SLIP)

    @property
    def touched_zero(self):
        return bool(self.events or self.crossings or np.any(self.stick)
                    or np.any((self.u[:, 0] == 0) & (self.u[:, 1] == 0)))

    def at(self, tq):
        """Evaluate ``u`` by piecewise cubic Hermite interpolation of the samples.

        At a repeated sample time the right-limit row is used.
        """
        tq = np.asarray(tq, dtype=float)
        ts, us, ds = self.t, self.u, self.udot
        if np.any(tq < ts[0]) or np.any(tq > ts[-1]):
            raise DomainError(f"query outside the sampled span [{float(ts[0])!r}, {float(ts[-1])!r}]")
        i = np.searchsorted(ts, tq, side="right") - 1
        i = np.clip(i, 0, len(ts) - 2)
        t0, t1 = ts[i], ts[i + 1]
        h = t1 - t0
        safe = np.where(h > 0, h, 1.0)
        s = np.clip((tq - t0) / safe, 0.0, 1.0)[..., None]
        hh = h[..., None]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s**2 * (3 - 2 * s)
        h11 = s**2 * (s - 1)
        out = h00 * us[i] + h10 * hh * ds[i] + h01 * us[i + 1] + h11 * hh * ds[i + 1]
        out = np.where((h > 0)[..., None], out, us[i])
        out = np.where((tq >= ts[-1])[..., None], us[-1], out)
        return np.where((tq <= ts[0])[..., None], us[0], out)


def release_direction(t, params, profile):
    """Unit direction along which ``u`` leaves zero when ``|V'(t)| > sigma``."""
    a = np.asarray(profile.Vdot(t), dtype=float)
    n = math.hypot(a[0], a[1])
    if n <= params.sigma:
        raise DomainError(f"|V'(t)| = {n!r} <= sigma at t={t!r}: release impossible")
    return -a / n


class _Run:
    """Mutable state of a single integration."""

    def __init__(self, t1, params, profile, dense):
        self.t1 = float(t1)
        self.params = params
        self.profile = profile
        self.dense = dense
        self.sigma = float(params.sigma)
        self.inv_k = params.inv_k
        self.eps = float(params.eps_stick)
        self.vdot = profile.vdot_xy
        self.rows = []  # (t, x, y, dx, dy, stick)
        self.events = []
        self.event_rows = []
        self.crossings = []

    # -- helpers ---------------------------------------------------------

    def field(self, t, x, y):
        s = self.sigma / math.hypot(x, y)  # ZeroDivisionError on the switching line
        ax, ay = self.vdot(t)
        return -s * x - ax - self.inv_k * x, -s * y - ay - self.inv_k * y

    def push(self, t, x, y, dx, dy, stick=False):
        self.rows.append((t, x, y, dx, dy, stick))

    def g_stick(self, t):
        ax, ay = self.vdot(t)
        return ax * ax + ay * ay - self.sigma * self.sigma

    def fill_stick(self, ta, tb):
        """Record rest samples strictly inside ``(ta, tb)``."""
        if not self.dense:
            return
        m = math.ceil((tb - ta) / self.params.sample_dt)
        for j in range(1, m):
            self.push(ta + (tb - ta) * j / m, 0.0, 0.0, 0.0, 0.0, True)

    # -- driver ----------------------------------------------------------

    def run(self, t0, u0):
        t = float(t0)
        x, y = float(u0[0]), float(u0[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NonFiniteStateError(t, (x, y))
        if math.hypot(x, y) <= self.eps:
            t, x, y, mode = self.at_zero(t, None)
        else:
            dx, dy = self.field(t, x, y)
            self.push(t, x, y, dx, dy)
            mode = Mode.SLIP
        while t < self.t1:
            if mode is Mode.SLIP:
                t, x, y, mode = self.slip(t, x, y)
            else:
                t, x, y, mode = self.stuck(t)
        return self

    def at_zero(self, t, d_in):
        """Handle arrival at ``u = 0`` (``d_in`` is the incoming unit direction)."""
        ax, ay = self.vdot(t)
        sigma = self.sigma
        if d_in is not None:
            self.push(t, 0.0, 0.0, -sigma * d_in[0] - ax, -sigma * d_in[1] - ay)
            if t >= self.t1:
                return t, 0.0, 0.0, Mode.SLIP
        if ax * ax + ay * ay <= sigma * sigma:
            self.rest(t, onset=d_in is not None)
            return t, 0.0, 0.0, Mode.STICK
        if d_in is not None:
            self.crossings.append(float(t))
        out = self.emit(t, release=d_in is None)
        if out is not None:
            return out + (Mode.SLIP,)
        # degenerate grazing: rest until the field clearly pushes away
        self.rest(t, onset=d_in is not None)
        return t, 0.0, 0.0, Mode.STICK

    def rest(self, t, onset):
        if onset:
            self.event_rows.append(len(self.rows))
            self.events.append(Event(EventKind.STICK_ONSET, float(t)))
        self.push(t, 0.0, 0.0, 0.0, 0.0, True)

    def radial(self, t, h):
        """Speed ``|u(t + h)|`` on the slow manifold after leaving zero at ``t``.

        Along ``u = r e(t)`` with ``e = -V'/|V'|`` the speed obeys
        ``r' = |V'| - sigma - r/k``; integrated by Gauss-Legendre quadrature.
        """
        total = 0.0
        vdot, sigma, inv_k = self.vdot, self.sigma, self.inv_k
        for xi, wi in zip(_GL_X, _GL_W):
            s = t + 0.5 * h * (1.0 + xi)
            ax, ay = vdot(s)
            total += wi * math.exp(-(t + h - s) * inv_k) * (math.hypot(ax, ay) - sigma)
        return 0.5 * h * total

    def lag(self, t, r):
        """Estimated offset of the true solution from the slow manifold at speed ``r``.

        The direction of ``u`` relaxes toward ``e(t)`` at rate ``|V'|/r`` while
        ``e`` turns at angular rate ``omega``, so it lags by ``omega r / |V'|``.
        """
        ax, ay = self.vdot(t)
        jx, jy = self.profile.vddot_xy(t)
        a2 = ax * ax + ay * ay
        omega = abs(ax * jy - ay * jx) / a2
        return omega * r * r / math.sqrt(a2)

    def emit(self, t, release):
        """Leave ``u = 0`` at ``t`` along the release direction.

        The first stretch is taken analytically on the slow manifold: close to
        zero the direction of ``u`` is slaved to ``-V'/|V'|`` on a time scale
        ``r/|V'|``, which would make explicit stepping stiff. Returns the new
        slip state, or None if the speed cannot outgrow the capture radius
        (grazing release).
        """
        ax, ay = self.vdot(t)
        a = math.hypot(ax, ay)
        if a <= self.sigma:
            return None
        cap = min(self.params.sample_dt, self.t1 - t)
        target = 10.0 * self.eps
        lag_tol = 100.0 * self.params.atol
        h = min(1e-9, cap)
        r = self.radial(t, h)
        while h < cap:
            h2 = min(2.0 * h, cap)
            r2 = self.radial(t, h2)
            if r >= target and (r2 <= r or self.lag(t + h2, r2) > lag_tol):
                break
            h, r = h2, r2
        if r <= self.eps and t + h < self.t1:
            return None
        r = max(r, 0.0)
        ex, ey = -ax / a, -ay / a
        if release:
            self.event_rows.append(len(self.rows))
            self.events.append(Event(EventKind.STICK_RELEASE, float(t), (ex, ey)))
        self.push(t, 0.0, 0.0, -self.sigma * ex - ax, -self.sigma * ey - ay)
        tn = t + h
        bx, by = self.vdot(tn)
        b = math.hypot(bx, by)
        x, y = -r * bx / b, -r * by / b
        if r > 0.0:
            dx, dy = self.field(tn, x, y)
        else:
            dx = dy = 0.0
        self.push(tn, x, y, dx, dy)
        return tn, x, y

    def stuck(self, t):
        t1, dt_max, tol = self.t1, self.params.dt_max, self.params.event_tol
        g = self.g_stick
        while t < t1:
            tn = min(t + dt_max, t1)
            if g(tn) > 0.0:
                lo, hi = t, tn
                while hi - lo > tol:
                    mid = 0.5 * (lo + hi)
                    if mid <= lo or mid >= hi:
                        break
                    if g(mid) > 0.0:
                        hi = mid
                    else:
                        lo = mid
                self.fill_stick(t, hi)
                self.push(hi, 0.0, 0.0, 0.0, 0.0, True)
                out = self.emit(hi, release=True)
                if out is not None:
                    return out + (Mode.SLIP,)
                # grazing: stay at rest a little longer
                tn = min(hi + self.params.sample_dt, t1)
                t = hi
            self.fill_stick(t, tn)
            self.push(tn, 0.0, 0.0, 0.0, 0.0, True)
            t = tn
        return t, 0.0, 0.0, Mode.STICK

    def slip(self, t, x, y):
        f = self.field
        params = self.params
        t1, dt_max = self.t1, params.dt_max
        rtol, atol = params.rtol, params.atol
        eps2 = self.eps * self.eps
        k1x, k1y = f(t, x, y)
        h = min(dt_max, 0.05 * math.hypot(x, y) / max(math.hypot(k1x, k1y), 1e-300))
        rejected = False
        while t < t1:
            h = min(h, dt_max)
            last = h >= t1 - t
            if last:
                h = t1 - t
            if h < H_MIN:
                raise StiffnessError(t, h)
            # ---- one Dormand-Prince trial step
            try:
                k2x, k2y = f(t + C2 * h, x + h * A21 * k1x, y + h * A21 * k1y)
                k3x, k3y = f(t + C3 * h, x + h * (A31 * k1x + A32 * k2x), y + h * (A31 * k1y + A32 * k2y))
                k4x, k4y = f(t + C4 * h,
                             x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                             y + h * (A41 * k1y + A42 * k2y + A43 * k3y))
                k5x, k5y = f(t + C5 * h,
                             x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                             y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y))
                k6x, k6y = f(t + h,
                             x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                             y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y))
                xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
                yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
                tn = t1 if last else t + h
                k7x, k7y = f(tn, xn, yn)
            except ZeroDivisionError:
                # a stage landed exactly on u = 0
                h *= MIN_FACTOR
                rejected = True
                continue
            if not (math.isfinite(xn) and math.isfinite(yn)):
                raise NonFiniteStateError(t + h, (xn, yn))
            ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            sx = atol + rtol * max(abs(x), abs(xn))
            sy = atol + rtol * max(abs(y), abs(yn))
            err = math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))
            if not err <= 1.0:
                h *= max(MIN_FACTOR, SAFETY * err ** -0.2) if math.isfinite(err) else MIN_FACTOR
                rejected = True
                continue
            kx = (k1x, k2x, k3x, k4x, k5x, k6x, k7x)
            ky = (k1y, k2y, k3y, k4y, k5y, k6y, k7y)
            qx = P.T @ kx
            qy = P.T @ ky

            def dense(th):
                return (x + h * th * (qx[0] + th * (qx[1] + th * (qx[2] + th * qx[3]))),
                        y + h * th * (qy[0] + th * (qy[1] + th * (qy[2] + th * qy[3]))))

            # ---- scan for arrival at the switching line
            hit = None
            lo = 0.0
            for th in _SCAN:
                ux, uy = (xn, yn) if th == 1.0 else dense(th)
                if ux * ux + uy * uy <= eps2:
                    hit = th
                    break
                lo = th
            if hit is not None:
                hi = hit
                while (hi - lo) * h > params.event_tol:
                    mid = 0.5 * (lo + hi)
                    ux, uy = dense(mid)
                    if ux * ux + uy * uy <= eps2:
                        hi = mid
                    else:
                        lo = mid
                return self.arrive(t, h, hi, dense)
            self.fill_slip(t, h, 1.0, dense)
            self.push(tn, xn, yn, k7x, k7y)
            t, x, y = tn, xn, yn
            k1x, k1y = k7x, k7y
            factor = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
            if rejected:
                factor = min(factor, 1.0)
                rejected = False
            h *= factor
        return t, x, y, Mode.SLIP

    def fill_slip(self, t, h, th_end, dense):
        if not self.dense:
            return
        m = math.ceil(h * th_end / self.params.sample_dt)
        for j in range(1, m):
            th = th_end * j / m
            ux, uy = dense(th)
            s = t + th * h
            dx, dy = self.field(s, ux, uy)
            self.push(s, ux, uy, dx, dy)

    def arrive(self, t, h, th, dense):
        """Finish a step truncated where ``|u|`` fell to the capture radius."""
        self.fill_slip(t, h, th, dense)
        te = t + th * h
        ux, uy = dense(th)
        r = math.hypot(ux, uy)
        if r > 0.0:
            dx, dy = self.field(te, ux, uy)
            rate = -(ux * dx + uy * dy) / r
            d_in = (ux / r, uy / r)
        else:
            rate = 0.0
            d_in = self.rows[-1][1:3]
            n = math.hypot(*d_in)
            d_in = (d_in[0] / n, d_in[1] / n) if n > 0 else (1.0, 0.0)
        # close the remaining gap to zero linearly
        tz = te + r / rate if rate > 0.0 else te
        tz = min(tz, self.t1)
        if tz > te:
            self.push(te, ux, uy, dx, dy)
        return self.at_zero(tz, d_in)


def simulate(u0, t0, t1, params, profile, dense=True):
    """Integrate the generalized solution starting from ``u(t0) = u0``.

    Parameters
    ----------
    u0 : array_like, shape (2,)
        Initial relative velocity. ``|u0| <= eps_stick`` is treated as rest.
    t0, t1 : float
        Time interval, ``t1 > t0``.
    params : SimParams
    profile : ForcingProfile
    dense : bool
        Record samples at spacing at most ``params.sample_dt``. When False
        only step end points and switching points are kept; the computed
        solution is identical either way.

    Returns
    -------
    Trajectory

    Raises
    ------
    StiffnessError
        The slip-phase step size fell below 1e-14.
    NonFiniteStateError
        The state became NaN or infinite.
    """
    if not t1 > t0:
        raise DomainError(f"need t1 > t0, got t0={t0!r}, t1={t1!r}")
    u0 = np.asarray(u0, dtype=float).reshape(2)
    run = _Run(t1, params, profile, dense).run(t0, u0)
    rows = np.array(run.rows, dtype=float)
    return Trajectory(
        t=rows[:, 0].copy(),
        u=rows[:, 1:3].copy(),
        udot=rows[:, 3:5].copy(),
        stick=rows[:, 5].astype(bool),
        events=tuple(run.events),
        event_rows=tuple(run.event_rows),
        crossings=tuple(run.crossings),
        params=params,
        profile=profile,
    )
