"""Trajectory CSV files and JSON serialization of reports."""

import csv
from dataclasses import fields, is_dataclass
from enum import Enum
import math

import numpy as np

from .errors import DomainError
from .integrator import Event, EventKind, Trajectory, release_direction

CSV_HEADER = ["t", "u_x", "u_y", "mode", "event"]


def _fmt(x):
    return f"{x:.17g}"


def write_trajectory_csv(trajectory, path):
    """Write ``t,u_x,u_y,mode,event`` rows with 17 significant digits."""
    marks = dict(zip(trajectory.event_rows, (e.kind.value for e in trajectory.events)))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i, (t, u, s) in enumerate(zip(trajectory.t, trajectory.u, trajectory.stick)):
            writer.writerow([_fmt(t), _fmt(u[0]), _fmt(u[1]), "stick" if s else "slip", marks.get(i, "")])


def read_trajectory_csv(path, params, profile):
    """Load a trajectory written by :func:`write_trajectory_csv`.

    ``udot`` is not stored in the file; it is rebuilt from the field, using
    the neighbouring rows to pick left/right limits at ``u = 0``.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise DomainError(f"unexpected CSV header {header!r}")
        rows = list(reader)
    if len(rows) < 2:
        raise DomainError("trajectory CSV needs at least two rows")
    t = np.array([float(r[0]) for r in rows])
    u = np.array([[float(r[1]), float(r[2])] for r in rows])
    stick = np.array([r[3] == "stick" for r in rows])
    marks = [r[4] for r in rows]

    sigma, inv_k = params.sigma, params.inv_k
    acc = profile.Vdot(t)
    speed = np.hypot(u[:, 0], u[:, 1])
    udot = np.zeros_like(u)
    moving = ~stick & (speed > 0)
    udot[moving] = -sigma * u[moving] / speed[moving, None] - acc[moving] - inv_k * u[moving]

    events, event_rows, crossings = [], [], []
    n = len(t)
    for i in range(n):
        if stick[i] or speed[i] > 0:
            continue
        same_next = i + 1 < n and t[i + 1] == t[i]
        same_prev = i > 0 and t[i - 1] == t[i]
        left = same_next or (i == n - 1 and not same_prev and i > 0)
        if left:
            d = u[i - 1] / speed[i - 1] if i > 0 and speed[i - 1] > 0 else np.zeros(2)
            udot[i] = -sigma * d - acc[i]
            if same_next and not stick[i + 1] and marks[i + 1] == "":
                crossings.append(float(t[i]))
        else:
            a = math.hypot(*acc[i])
            e = -acc[i] / a if a > 0 else np.zeros(2)
            udot[i] = -sigma * e - acc[i]
    for i, mark in enumerate(marks):
        if not mark:
            continue
        kind = EventKind(mark)
        rel = None
        if kind is EventKind.STICK_RELEASE:
            try:
                rel = tuple(release_direction(t[i], params, profile).tolist())
            except DomainError:
                rel = None
        events.append(Event(kind, float(t[i]), rel))
        event_rows.append(i)
    return Trajectory(t=t, u=u, udot=udot, stick=stick, events=tuple(events),
                      event_rows=tuple(event_rows), crossings=tuple(crossings),
                      params=params, profile=profile)


def to_jsonable(obj):
    """Convert reports (nested dataclasses, arrays, enums) to JSON-ready values.

    Trajectories are summarized rather than embedded; the CSV file is the
    full record.
    """
    if isinstance(obj, Trajectory):
        return {
            "n_samples": len(obj),
            "t_span": [float(obj.t[0]), float(obj.t[-1])],
            "events": [to_jsonable(e) for e in obj.events],
            "crossings": [float(c) for c in obj.crossings],
            "final_u": obj.u[-1].tolist(),
        }
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj
