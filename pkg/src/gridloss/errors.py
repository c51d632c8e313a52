"""Exception hierarchy.

Domain errors (bad graphs, bad covariances) derive from ``DomainError`` so the
CLI can map them onto a single exit code.
"""


class GridLossError(Exception):
    pass


class DomainError(GridLossError, ValueError):
    pass


class InvalidGraph(DomainError):
    pass


class DisconnectedGraph(DomainError):
    pass


class NotSymmetric(DomainError):
    pass


class NotPSD(DomainError):
    pass


class DegenerateNoise(DomainError):
    pass


class InvalidParameter(DomainError):
    pass


class InvalidK(InvalidParameter):
    pass


class InvalidPenalty(InvalidParameter):
    pass


class InfeasibleControl(DomainError):
    """Load-sharing vector violates 1'a = 1 or has mass outside its support."""


class DimensionMismatch(GridLossError, ValueError):
    pass


class IndexOutOfRange(GridLossError, IndexError):
    pass


class FullSetRequested(GridLossError, ValueError):
    """Raised by the k < n solver when every node is controllable."""


class SingularKKT(GridLossError, ArithmeticError):
    pass
