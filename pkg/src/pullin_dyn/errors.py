"""Exception hierarchy shared by all modules.

The CLI maps these onto stable exit codes: invalid input (2), convexity
violation (3), integrator or quadrature failure (4), regime mismatch (5).
"""


class PullInDynError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(PullInDynError, ValueError):
    """A parameter violates its documented domain."""


class ConvexityError(InvalidParameterError):
    """Cubic stiffness too large for the convexity condition kappa < 16/(3(xi+1)^2)."""


class SingularityError(PullInDynError, ValueError):
    """Displacement at or beyond the electrostatic singularity x = xi + 1."""


class RegimeMismatchError(PullInDynError, ValueError):
    """Operation called outside the dynamical regime it is defined for."""


class SupercriticalError(RegimeMismatchError):
    """Voltage at or above the pull-in threshold where a subcritical quantity was requested."""


class SubcriticalError(RegimeMismatchError):
    """Voltage below the pull-in threshold where a supercritical quantity was requested."""


class NotApplicableError(PullInDynError, ValueError):
    """Diagnostic requested on a trajectory that does not support it."""


class IntegratorFailureError(PullInDynError, RuntimeError):
    """Time integration violated an invariant (named in the message)."""


class QuadratureFailureError(PullInDynError, RuntimeError):
    """Quadrature did not converge within the configured refinement budget."""
