"""Exception types raised across the library."""


class RobinFemError(Exception):
    """Base class for all library errors."""


class InvalidParameter(RobinFemError):
    """A constructor or generator argument is outside its admissible range."""


class DegenerateProjection(RobinFemError):
    """Boundary projection is undefined at this point (e.g. disk center)."""


class NotOnBoundary(RobinFemError):
    """A point expected on the domain boundary is not on it."""


class NonManifoldMesh(RobinFemError):
    """An edge is shared by more than two triangles."""


class FormatError(RobinFemError):
    """Mesh file violates the expected text format."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedOrder(RobinFemError):
    """Requested quadrature order has no tabulated rule."""


class ArityMismatch(RobinFemError):
    """Number of traces does not match the edge type."""


class SchemeMismatch(RobinFemError):
    """Operation is not defined for the given scheme."""


class MissingExactSolution(RobinFemError):
    """Problem data has no exact solution to compare against."""


class NotConverged(RobinFemError):
    """Iterative solver exhausted its iteration budget.

    The relative residual history is attached as ``residual_history``.
    """

    def __init__(self, message, residual_history=None):
        self.residual_history = list(residual_history or [])
        super().__init__(message)


class IndefiniteMatrix(RobinFemError):
    """Matrix is not positive definite (coercivity failure, gamma too large).

    Carries the CG residual history accumulated before detection, if any.
    """

    def __init__(self, message, residual_history=None):
        self.residual_history = list(residual_history or [])
        super().__init__(message)


class TooLarge(RobinFemError):
    """Problem dimension exceeds the limit of a dense code path."""


class DegenerateSequence(RobinFemError):
    """Error sequence unusable for convergence-order computation."""


class ConfigurationError(RobinFemError):
    """Invalid study or command-line configuration."""
