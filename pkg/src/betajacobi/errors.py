"""Shared exception and warning types."""


class ParameterError(ValueError):
    """Parameters outside the admissible domain."""


class PoleError(ParameterError):
    """An exact pole (gamma function or series denominator) was hit."""


class UnsupportedRegionError(ValueError):
    """Argument lies outside the implemented evaluation regions.

    Callers that can do so should fall back to the continued-fraction
    route, which has no region restriction away from the support.
    """


class ConvergenceError(RuntimeError):
    """An iterative computation failed to converge."""


class ConvergenceWarning(UserWarning):
    """A result was returned but an internal convergence check was loose."""
