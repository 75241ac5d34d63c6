"""JSON run configuration.

Example::

    {
      "sigma": 0.3,
      "forcing": {"mean": [0, 0], "cos_coeffs": [], "sin_coeffs": [[0.5, 0.0]]},
      "k": 100,
      "u0": [0, 0],
      "t_span": [0, 1],
      "tolerances": {"fp_tol": 1e-10, "event_tol": 1e-12, "dt_max": 0.0078125, "eps_stick": null},
      "seed": 1
    }

Only ``sigma`` and ``forcing`` are required. ``cos`` and ``sin`` are accepted
as short spellings of ``cos_coeffs`` and ``sin_coeffs``.
"""

from dataclasses import dataclass, field
import json
import math

from .errors import ConfigError
from .forcing import ForcingProfile
from .friction import SimParams

_TOP_KEYS = {"sigma", "forcing", "k", "u0", "t_span", "tolerances", "seed"}
_FORCING_KEYS = {"mean", "cos_coeffs", "sin_coeffs", "cos", "sin"}
_TOL_KEYS = {"fp_tol", "event_tol", "dt_max", "eps_stick"}


@dataclass(frozen=True)
class Tolerances:
    fp_tol: float = 1e-10
    event_tol: float = 1e-12
    dt_max: float = 1.0 / 128
    eps_stick: float | None = None


@dataclass(frozen=True)
class RunConfig:
    sigma: float
    mean: tuple = (0.0, 0.0)
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()
    k: float | None = None
    u0: tuple = (0.0, 0.0)
    t_span: tuple = (0.0, 1.0)
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int | None = None

    def profile(self):
        return ForcingProfile(cos_coeffs=self.cos_coeffs, sin_coeffs=self.sin_coeffs, mean=self.mean)

    def sim_params(self):
        tol = self.tolerances
        return SimParams(self.sigma, k=self.k, eps_stick=tol.eps_stick,
                         event_tol=tol.event_tol, dt_max=tol.dt_max)

    def to_dict(self):
        return {
            "sigma": self.sigma,
            "forcing": {"mean": list(self.mean),
                        "cos_coeffs": [list(c) for c in self.cos_coeffs],
                        "sin_coeffs": [list(s) for s in self.sin_coeffs]},
            "k": self.k,
            "u0": list(self.u0),
            "t_span": list(self.t_span),
            "tolerances": {
                "fp_tol": self.tolerances.fp_tol,
                "event_tol": self.tolerances.event_tol,
                "dt_max": self.tolerances.dt_max,
                "eps_stick": self.tolerances.eps_stick,
            },
            "seed": self.seed,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def _number(value, name, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    if positive and not value > 0:
        raise ConfigError(f"{name} must be > 0, got {value!r}")
    return value


def _vector(value, name):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f"{name} must be a 2-vector, got {value!r}")
    return tuple(_number(v, f"{name}[{i}]") for i, v in enumerate(value))


def _vectors(value, name):
    if not isinstance(value, list):
        raise ConfigError(f"{name} must be an array of 2-vectors")
    return tuple(_vector(v, f"{name}[{i}]") for i, v in enumerate(value))


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {', '.join(unknown)}")


def parse_config(text):
    """Parse and validate a JSON run configuration.

    Raises
    ------
    ConfigError
        On malformed JSON (message carries line and column), unknown keys,
        missing ``sigma``/``forcing`` or invalid values.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    _check_keys(raw, _TOP_KEYS, "config")
    if "sigma" not in raw:
        raise ConfigError("missing field sigma")
    if "forcing" not in raw:
        raise ConfigError("missing field forcing")
    sigma = _number(raw["sigma"], "sigma", positive=True)

    forcing = raw["forcing"]
    _check_keys(forcing, _FORCING_KEYS, "forcing")
    mean = _vector(forcing.get("mean", [0.0, 0.0]), "forcing.mean")
    coeffs = {}
    for name in ("cos", "sin"):
        full = f"{name}_coeffs"
        if name in forcing and full in forcing:
            raise ConfigError(f"forcing.{name} and forcing.{full} are the same field; give one")
        coeffs[full] = _vectors(forcing.get(full, forcing.get(name, [])), f"forcing.{full}")

    k = raw.get("k")
    if k is not None:
        k = _number(k, "k", positive=True)
    u0 = _vector(raw.get("u0", [0.0, 0.0]), "u0")
    t_span = _vector(raw.get("t_span", [0.0, 1.0]), "t_span")
    if not t_span[1] > t_span[0]:
        raise ConfigError(f"t_span must be increasing, got {list(t_span)}")

    tol_raw = raw.get("tolerances", {})
    _check_keys(tol_raw, _TOL_KEYS, "tolerances")
    defaults = Tolerances()
    tol_values = {}
    for key in ("fp_tol", "event_tol", "dt_max"):
        tol_values[key] = _number(tol_raw.get(key, getattr(defaults, key)), f"tolerances.{key}", positive=True)
    eps = tol_raw.get("eps_stick")
    tol_values["eps_stick"] = None if eps is None else _number(eps, "tolerances.eps_stick", positive=True)

    seed = raw.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    config = RunConfig(sigma=sigma, mean=mean, **coeffs, k=k, u0=u0, t_span=t_span,
                       tolerances=Tolerances(**tol_values), seed=seed)
    try:
        config.sim_params()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return config
