"""Periodic solutions as fixed points of the time-1 map, and a-priori bound checks.

With regularization ``k`` the time-1 map is a contraction with factor at most
``exp(-1/k)`` and plain iteration from ``u = 0`` converges. The unregularized
system is only nonexpansive; its periodic orbit is reached as the limit of the
regularized orbits for growing ``k`` and then certified (and polished) on the
unregularized map itself.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import os

import numpy as np

from .errors import DomainError, NonConvergenceError
from .integrator import simulate

__all__ = [
    "BoundReport",
    "PeriodicSolveReport",
    "ConvergenceRow",
    "ConvergenceStudy",
    "find_periodic",
    "verify_bounds",
    "convergence_study",
    "sup_distance",
]

@dataclass(frozen=True)
class BoundReport:
    """Norms of a periodic orbit against its a-priori bounds.

    Every margin is ``bound - value``; a check passes when its margin is at
    least ``-tol``. The checks are

    * ``eq9``: ``||u'||_L2 <= ||V'||_L2``;
    * ``eq10``: ``sigma ||u||_L1 <= ||V||_L2 ||u'||_L2``;
    * ``rho``: ``sup|u| <= ||V'||_L2``, claimed only when the orbit touches
      zero (otherwise ``rho`` and ``rho_margin`` are None);
    * energy: pointwise residual of
      ``|u'|^2 + sigma d|u|/dt + (V', u') + (1/2k) d|u|^2/dt = 0`` at slip samples.
    """

    sup_u: float
    L2_udot: float
    L1_u: float
    L2_Vdot: float
    L2_V: float
    rho: float | None
    rho_bound_ok: bool
    rho_margin: float | None
    eq9_ok: bool
    eq9_margin: float
    eq10_ok: bool
    eq10_margin: float
    energy_identity_max_err: float
    energy_ok: bool
    touched_zero: bool
    tol: float

    @property
    def all_ok(self):
        return self.rho_bound_ok and self.eq9_ok and self.eq10_ok and self.energy_ok


@dataclass(frozen=True)
class PeriodicSolveReport:
    converged: bool
    fixed_point: np.ndarray
    residual: float
    iterations: int
    k_used: float | None
    trajectory: object = None
    bound_report: BoundReport | None = None
    residual_history: tuple = ()
    k_path: tuple = ()


@dataclass(frozen=True)
class ConvergenceRow:
    k: float
    sup_diff: float
    fixed_point_distance: float
    perturbation_bound: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: tuple
    reference: PeriodicSolveReport
    monotone: bool


def _time1_map(params, profile):
    return lambda u: simulate(u, 0.0, 1.0, params, profile, dense=False).final.u


def _anderson(T, x0, fp_tol, max_iter, memory=3):
    """Safeguarded Anderson-accelerated iteration of ``x -> T(x)``.

    Returns ``(x, residual, n_evals, history, converged)`` where ``residual``
    is ``|T(x) - x|`` for the returned ``x``. An extrapolated step that fails
    to reduce the residual is discarded in favour of a plain iteration step.
    """
    x = np.asarray(x0, dtype=float)
    g = T(x)
    f = g - x
    res = float(np.hypot(*f))
    history = [res]
    n = 1
    fs, gs = [f], [g]
    plain = False
    while res > fp_tol and n < max_iter:
        if plain or len(fs) < 2:
            x_new = g
        else:
            dF = np.diff(np.array(fs[-memory - 1:]), axis=0).T
            dG = np.diff(np.array(gs[-memory - 1:]), axis=0).T
            gamma = np.linalg.lstsq(dF, f, rcond=None)[0]
            x_new = g - dG @ gamma
        g_new = T(x_new)
        n += 1
        f_new = g_new - x_new
        res_new = float(np.hypot(*f_new))
        if plain or res_new <= res:
            x, g, f, res = x_new, g_new, f_new, res_new
            history.append(res)
            fs.append(f)
            gs.append(g)
            plain = False
        else:
            fs, gs = [f], [g]
            plain = True
    return x, res, n, tuple(history), res <= fp_tol


def sup_distance(a, b, n=16385):
    """Sup over ``[0, 1]`` of ``|a(t) - b(t)|`` for two trajectories."""
    grid = np.union1d(np.linspace(0.0, 1.0, n), np.union1d(a.t, b.t))
    return float(np.max(np.linalg.norm(a.at(grid) - b.at(grid), axis=-1)))


def _finish(params, profile, x, res, n, history, converged, fp_tol, k_path=()):
    traj = bounds = None
    if converged:
        traj = simulate(x, 0.0, 1.0, params, profile)
        bounds = verify_bounds(traj, params, profile, fp_tol=max(fp_tol, res))
    return PeriodicSolveReport(
        converged=converged,
        fixed_point=x,
        residual=res,
        iterations=n,
        k_used=params.k,
        trajectory=traj,
        bound_report=bounds,
        residual_history=history,
        k_path=tuple(k_path),
    )


def find_periodic(params, profile, max_iter=200, fp_tol=1e-10, u_start=None,
                  k_start=1e3, k_tol=1e-6, max_doublings=20):
    """Initial condition of a 1-periodic solution and its bound report.

    Parameters
    ----------
    params : SimParams
        With ``params.k`` set the regularized map is iterated directly.
        Without it, regularized orbits for ``k = k_start, 2 k_start, ...``
        are computed until two successive orbits differ by less than
        ``k_tol`` in sup norm; the limit (extrapolated in ``1/k``) then
        seeds the iteration of the unregularized map.
    profile : ForcingProfile
    max_iter : int
        Map evaluations allowed per fixed-point solve.
    fp_tol : float
        Required ``|T(u) - u|``.
    u_start : array_like, optional
        Starting point, default ``(0, 0)``.

    Returns
    -------
    PeriodicSolveReport
        ``converged`` is False (no exception) when the iteration budget ran
        out; ``residual`` then carries the last residual.
    """
    if not fp_tol > 0:
        raise DomainError("fp_tol must be positive")
    x0 = np.zeros(2) if u_start is None else np.asarray(u_start, dtype=float).reshape(2)
    if params.k is not None:
        out = _anderson(_time1_map(params, profile), x0, fp_tol, max_iter)
        return _finish(params, profile, *out, fp_tol)

    k_path = []
    prev = None
    k = float(k_start)
    for _ in range(max_doublings):
        pk = params.with_k(k)
        x, res, n, history, ok = _anderson(_time1_map(pk, profile), x0, fp_tol, max_iter)
        if not ok:
            return _finish(params, profile, x, res, n, history, False, fp_tol, k_path)
        orbit = simulate(x, 0.0, 1.0, pk, profile)
        k_path.append((k, x))
        if prev is not None and sup_distance(orbit, prev) < k_tol:
            break
        prev, x0 = orbit, x
        k *= 2.0
    if len(k_path) >= 2:
        # fixed points drift like 1/k, so (k, 2k) extrapolate linearly to 1/k = 0
        x0 = 2.0 * k_path[-1][1] - k_path[-2][1]
    out = _anderson(_time1_map(params, profile), x0, fp_tol, max_iter)
    return _finish(params, profile, *out, fp_tol, k_path)


def verify_bounds(trajectory, params=None, profile=None, fp_tol=1e-8, tol=1e-6):
    """Check the a-priori estimates on a periodic orbit sampled over ``[0, 1]``.

    Integrals use the composite trapezoid rule on the trajectory samples;
    repeated sample times at switching points contribute zero-width panels,
    so no panel straddles a jump of ``udot``.
    """
    params = trajectory.params if params is None else params
    profile = trajectory.profile if profile is None else profile
    t, u, d = trajectory.t, trajectory.u, trajectory.udot
    if abs(t[0]) > 1e-12 or abs(t[-1] - 1.0) > 1e-12:
        raise DomainError(f"trajectory must span [0, 1], got [{float(t[0])!r}, {float(t[-1])!r}]")
    gap = float(np.hypot(*(u[-1] - u[0])))
    if gap > 10 * fp_tol:
        raise DomainError(f"trajectory is not periodic: |u(1) - u(0)| = {gap:.3e}")

    sigma, inv_k = params.sigma, params.inv_k
    nrm = profile.norms()
    speed = np.linalg.norm(u, axis=1)
    sup_u = float(speed.max())
    L2_udot = math.sqrt(np.trapezoid(np.sum(d * d, axis=1), t))
    L1_u = float(np.trapezoid(speed, t))

    # energy identity |u'|^2 + sigma d|u|/dt + (V', u') + (1/2k) d|u|^2/dt = 0 during slip,
    # with d|u|/dt = (u, u')/|u| and d|u|^2/dt = 2 (u, u') taken analytically
    slip = ~trajectory.stick & (speed > 0)
    err = np.zeros(0)
    if slip.any():
        us, ds = u[slip], d[slip]
        ud = np.sum(us * ds, axis=1)
        err = np.abs(np.sum(ds * ds, axis=1) + sigma * ud / speed[slip]
                     + np.sum(profile.Vdot(t[slip]) * ds, axis=1) + inv_k * ud)
    energy_err = float(err.max()) if err.size else 0.0

    touched = trajectory.touched_zero
    if touched:
        rho = nrm.L2_Vdot
        rho_margin = rho - sup_u
        rho_ok = rho_margin >= -tol
    else:
        rho = rho_margin = None
        rho_ok = True
    eq9_margin = nrm.L2_Vdot - L2_udot
    eq10_margin = nrm.L2_V * L2_udot - sigma * L1_u
    return BoundReport(
        sup_u=sup_u,
        L2_udot=L2_udot,
        L1_u=L1_u,
        L2_Vdot=nrm.L2_Vdot,
        L2_V=nrm.L2_V,
        rho=rho,
        rho_bound_ok=rho_ok,
        rho_margin=rho_margin,
        eq9_ok=eq9_margin >= -tol,
        eq9_margin=eq9_margin,
        eq10_ok=eq10_margin >= -tol,
        eq10_margin=eq10_margin,
        energy_identity_max_err=energy_err,
        energy_ok=energy_err <= tol,
        touched_zero=touched,
        tol=tol,
    )


def default_workers():
    try:
        return max(1, int(os.environ.get("STICKSLIP_THREADS", "1")))
    except ValueError:
        return 1


def convergence_study(params, profile, k_list, fp_tol=1e-10, max_iter=200, workers=None, reference=None):
    """Distance of regularized periodic orbits to the unregularized one as ``k`` grows.

    Returns a :class:`ConvergenceStudy` whose rows follow ``k_list``. The
    ``monotone`` flag allows 10% slack between consecutive differences.
    """
    k_list = [float(k) for k in k_list]
    if len(k_list) < 2:
        raise DomainError("k_list needs at least two entries")
    if any(b <= a for a, b in zip(k_list, k_list[1:])):
        raise DomainError("k_list must be strictly increasing")
    if reference is None:
        reference = find_periodic(params.with_k(None), profile, max_iter=max_iter, fp_tol=fp_tol)
    if not reference.converged:
        raise NonConvergenceError(f"reference orbit did not converge (residual {reference.residual:.3e})")

    solve = lambda k: find_periodic(params.with_k(k), profile, max_iter=max_iter, fp_tol=fp_tol)
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(solve, k_list))
    else:
        reports = [solve(k) for k in k_list]
    for k, rep in zip(k_list, reports):
        if not rep.converged:
            raise NonConvergenceError(f"periodic solve for k={k!r} did not converge (residual {rep.residual:.3e})")

    rho = max(rep.bound_report.sup_u for rep in reports)
    rows = tuple(
        ConvergenceRow(
            k=k,
            sup_diff=sup_distance(rep.trajectory, reference.trajectory),
            fixed_point_distance=float(np.hypot(*(rep.fixed_point - reference.fixed_point))),
            perturbation_bound=(rho + 1.0) / k,
            iterations=rep.iterations,
            residual=rep.residual,
        )
        for k, rep in zip(k_list, reports)
    )
    diffs = [r.sup_diff for r in rows]
    monotone = all(b <= 1.1 * a for a, b in zip(diffs, diffs[1:]))
    return ConvergenceStudy(rows=rows, reference=reference, monotone=monotone)
