"""Exception hierarchy shared across the package."""


class GroupOrderError(Exception):
    """Base class for all errors raised by grouporder."""


class LayoutError(GroupOrderError, ValueError):
    """Invalid group layout, group id or permutation."""


class DataError(GroupOrderError, ValueError):
    """Malformed data matrix (shape, non-finite entries, too few samples)."""


class DegenerateVariableError(GroupOrderError, ValueError):
    """A variable is (numerically) constant where variation is required."""


class SingularRegressorsError(GroupOrderError, ArithmeticError):
    """The regressor covariance is too ill-conditioned for OLS.

    Use a positive ridge parameter instead.
    """


class SampleTooSmallError(GroupOrderError, ValueError):
    """Not enough observations for the requested test."""


class NoEffectError(GroupOrderError, ArithmeticError):
    """The estimated connection matrix is numerically zero."""


class OrderingError(GroupOrderError):
    """A failure inside the iterative ordering loop.

    ``iteration`` is the 1-based round in which the failure occurred and
    ``__cause__`` holds the original exception.
    """

    def __init__(self, iteration: int, cause: Exception):
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"iteration {iteration}: {cause}")
