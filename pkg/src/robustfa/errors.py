"""Exception types shared across the package."""


class RobustFAError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(RobustFAError, ValueError):
    """An argument violates a documented precondition."""


class NumericalFailure(RobustFAError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class RankDeficient(RobustFAError, ValueError):
    """A matrix that must have full column rank does not.

    The offending column index (0-based) is stored on ``column`` when known.
    """

    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


class NotPositiveDefinite(RobustFAError, ValueError):
    """A matrix required to be symmetric positive definite is not."""


class DegeneratePanel(RobustFAError, ValueError):
    """The panel carries no usable variation (for example, identical rows)."""


class DegenerateWeights(RobustFAError, ValueError):
    """Minimum-variance weights are undefined because 1' Sigma^-1 1 is ~ 0."""


class FormatError(RobustFAError, ValueError):
    """A CSV file violates the expected panel format.

    ``row`` and ``column`` (1-based, header = row 1) locate the problem when known.
    """

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class ReplicationFailure(RobustFAError):
    """A Monte Carlo replication raised; ``rep`` records which one."""

    def __init__(self, message: str, rep: int):
        super().__init__(message)
        self.rep = rep
