"""Periodic stick-slip motion of a particle on a vibrating rough plane."""

from .config import RunConfig, Tolerances, parse_config
from .errors import (
    ConfigError,
    DomainError,
    IntegrationError,
    NonConvergenceError,
    NonFiniteStateError,
    StickSlipError,
    StiffnessError,
)
from .forcing import ForcingProfile, Norms, eval_V, eval_Vdot, norms
from .friction import (
    FilippovSet,
    SetKind,
    SimParams,
    filippov_set,
    monotonicity_gap,
    residual_distance,
    slip_field,
    stick_admissible,
)
from .integrator import Event, EventKind, Mode, State, Trajectory, release_direction, simulate
from .io import read_trajectory_csv, to_jsonable, write_trajectory_csv
from .periodic import (
    BoundReport,
    ConvergenceRow,
    ConvergenceStudy,
    PeriodicSolveReport,
    convergence_study,
    find_periodic,
    sup_distance,
    verify_bounds,
)
from .regularized import contraction_bound, invariant_radius, map_contraction_factor, poincare_map

__version__ = "0.1.0"
