"""Exception types shared across the package."""


class NewtonSwitchError(Exception):
    """Base class for all package-specific errors."""


class SingularSystem(NewtonSwitchError):
    """A linear solve was attempted with a singular (to working precision) matrix."""


class NonFiniteValue(NewtonSwitchError):
    """A function or Jacobian evaluation produced NaN/Inf."""


class DomainViolation(NewtonSwitchError):
    """A point left the problem's domain box."""


class DegenerateStep(NewtonSwitchError):
    """Two iterates are too close to form a Lipschitz quotient."""


class StepCollapse(NewtonSwitchError):
    """Even the minimal admissible step violates the path-deviation bound."""


class GuardViolation(NewtonSwitchError):
    """The frozen-matrix iteration left its certified ball.

    Carries the partial run as ``result`` (a
    :class:`newton_switch.kernel.SimplifiedRunResult` with
    ``converged=False``); the driver decides whether to resume the
    adaptive phase from ``result.point``.
    """

    def __init__(self, result):
        super().__init__("simplified iteration left the guard ball")
        self.result = result


class UsageError(NewtonSwitchError):
    """Bad command-line usage (exit code 1)."""


class IoFailure(NewtonSwitchError):
    """An output file could not be written."""


class EstimateOverflowWarning(UserWarning):
    """The matrix-approximation defect estimate reached 1 (assumption violated)."""
