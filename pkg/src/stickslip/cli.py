"""Command-line entry point: ``stickslip {simulate,periodic,converge,verify}``.

Exit status is 0 on success, 2 for invalid configuration or input files and
3 for numerical failure (stiffness, non-convergence, violated bounds).
"""

import argparse
import json
from pathlib import Path
import sys

from .config import parse_config
from .errors import ConfigError, DomainError, IntegrationError, NonConvergenceError
from .integrator import simulate
from .io import read_trajectory_csv, to_jsonable, write_trajectory_csv
from .periodic import convergence_study, find_periodic, verify_bounds

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class _NumericalFailure(Exception):
    """Raised by a subcommand that ran but whose result is not acceptable."""


def _k_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if len(values) < 2 or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("need at least two positive values")
    return values


def build_parser():
    parser = argparse.ArgumentParser(prog="stickslip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
        p.add_argument("--csv", action="store_true", help="write the trajectory CSV")
        p.add_argument("--json", action="store_true", help="write the JSON report")
        return p

    common(sub.add_parser("simulate", help="integrate over t_span from u0"))
    p = common(sub.add_parser("periodic", help="solve for the 1-periodic orbit"))
    p.add_argument("--max-iter", type=int, default=200)
    p = common(sub.add_parser("converge", help="distance of k-orbits to the unregularized orbit"))
    p.add_argument("--k-list", type=_k_list, default=[1e2, 1e3, 1e4], help="comma-separated, increasing")
    p.add_argument("--max-iter", type=int, default=200)
    p = common(sub.add_parser("verify", help="check the a-priori bounds on a periodic orbit"))
    p.add_argument("--trajectory", type=Path, help="orbit CSV to check (default: solve for it)")
    p.add_argument("--max-iter", type=int, default=200)
    return parser


def _write_json(path, payload):
    path.write_text(json.dumps(to_jsonable(payload), indent=2) + "\n")


def _bounds_payload(bounds):
    payload = to_jsonable(bounds)
    payload["all_ok"] = bounds.all_ok
    return payload


def _periodic_payload(report):
    payload = to_jsonable(report)
    if report.bound_report is not None:
        payload["bound_report"] = _bounds_payload(report.bound_report)
    return payload


def _cmd_simulate(cfg, args, want_csv, want_json):
    traj = simulate(cfg.u0, *cfg.t_span, cfg.sim_params(), cfg.profile())
    if want_csv:
        write_trajectory_csv(traj, args.out / "trajectory.csv")
    if want_json:
        _write_json(args.out / "simulate.json", {"config": cfg.to_dict(), "trajectory": traj})
    print(f"simulated t in [{traj.t[0]:g}, {traj.t[-1]:g}]: {len(traj)} samples, "
          f"{len(traj.events)} events, u(end) = {traj.final.u.tolist()}")


def _solve(cfg, max_iter):
    report = find_periodic(cfg.sim_params(), cfg.profile(), max_iter=max_iter,
                           fp_tol=cfg.tolerances.fp_tol, u_start=cfg.u0)
    if not report.converged:
        raise NonConvergenceError(f"periodic solve did not converge (residual {report.residual:.3e})")
    return report


def _cmd_periodic(cfg, args, want_csv, want_json):
    report = _solve(cfg, args.max_iter)
    if want_csv:
        write_trajectory_csv(report.trajectory, args.out / "orbit.csv")
    if want_json:
        _write_json(args.out / "periodic.json", _periodic_payload(report))
    print(f"fixed point {report.fixed_point.tolist()} residual {report.residual:.3e} "
          f"after {report.iterations} iterations")


def _cmd_converge(cfg, args, want_csv, want_json):
    study = convergence_study(cfg.sim_params(), cfg.profile(), args.k_list,
                              fp_tol=cfg.tolerances.fp_tol, max_iter=args.max_iter)
    if want_csv:
        write_trajectory_csv(study.reference.trajectory, args.out / "orbit.csv")
    if want_json:
        payload = to_jsonable(study)
        payload["reference"] = _periodic_payload(study.reference)
        _write_json(args.out / "converge.json", payload)
    for row in study.rows:
        print(f"k={row.k:<10g} sup_diff={row.sup_diff:.3e} bound={row.perturbation_bound:.3e}")
    print(f"monotone: {study.monotone}")


def _cmd_verify(cfg, args, want_csv, want_json):
    params, profile = cfg.sim_params(), cfg.profile()
    if args.trajectory is not None:
        traj = read_trajectory_csv(args.trajectory, params, profile)
    else:
        traj = _solve(cfg, args.max_iter).trajectory
        if want_csv:
            write_trajectory_csv(traj, args.out / "orbit.csv")
    bounds = verify_bounds(traj, params, profile, fp_tol=cfg.tolerances.fp_tol)
    if want_json:
        _write_json(args.out / "verify.json", _bounds_payload(bounds))
    print(f"sup|u|={bounds.sup_u:.6g} L2(u')={bounds.L2_udot:.6g} L1(u)={bounds.L1_u:.6g} "
          f"energy_err={bounds.energy_identity_max_err:.2e} all_ok={bounds.all_ok}")
    if not bounds.all_ok:
        raise _NumericalFailure("a-priori bound violated")


_COMMANDS = {
    "simulate": _cmd_simulate,
    "periodic": _cmd_periodic,
    "converge": _cmd_converge,
    "verify": _cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    want_csv, want_json = args.csv, args.json
    if not (want_csv or want_json):
        want_csv = want_json = True
    try:
        cfg = parse_config(args.config.read_text())
        args.out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, args, want_csv, want_json)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, NonConvergenceError, _NumericalFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
