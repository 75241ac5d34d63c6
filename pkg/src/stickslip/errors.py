"""Exception hierarchy shared by all stickslip modules."""


class StickSlipError(Exception):
    """Base class for errors raised by this package."""


class DomainError(StickSlipError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ConfigError(StickSlipError, ValueError):
    """A run configuration could not be parsed or failed validation."""


class IntegrationError(StickSlipError, RuntimeError):
    """Numerical failure inside the time integrator."""


class StiffnessError(IntegrationError):
    """The adaptive step size dropped below the admissible floor."""

    def __init__(self, t, h):
        self.t = t
        self.h = h
        super().__init__(f"step size underflow (h={h:.3e}) at t={t!r}")


class NonFiniteStateError(IntegrationError):
    """The integrated state became NaN or infinite."""

    def __init__(self, t, u):
        self.t = t
        self.u = u
        super().__init__(f"non-finite state u={u!r} at t={t!r}")


class NonConvergenceError(StickSlipError, RuntimeError):
    """A fixed-point iteration exhausted its budget."""
