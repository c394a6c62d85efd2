"""Exception types shared across the package.

The command line front end maps these onto process exit codes:
configuration problems exit with 1, numeric failures with 2 and
theorem-verification failures with 3.
"""


class DeltaPrimeError(Exception):
    """Base class for all package errors."""


class DomainError(DeltaPrimeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OverflowRangeError(DomainError):
    """An argument would overflow double precision in an unscaled evaluation."""


class ConvergenceError(DeltaPrimeError, RuntimeError):
    """An iterative solver failed to reach its tolerance within budget."""


class GeometryError(DeltaPrimeError, RuntimeError):
    """A contour is invalid or a geometric computation lost resolution."""


class MeshError(DeltaPrimeError, RuntimeError):
    """Mesh generation produced an invalid triangulation."""


class ConfigError(DeltaPrimeError, ValueError):
    """A run configuration (flags or config file) is inconsistent."""


class TheoremCheckFailure(DeltaPrimeError, RuntimeError):
    """An inequality asserted by the verification pipeline does not hold."""
