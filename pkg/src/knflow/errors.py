"""Exception and warning types raised across the package."""


class KnflowError(Exception):
    """Base class for all errors raised by knflow."""


class DimensionMismatch(KnflowError, ValueError):
    pass


class NonSemisimple(KnflowError):
    """Eigenvector basis is too ill-conditioned; the matrix is treated as defective."""


class NotNormal(KnflowError):
    pass


class NotHermitian(KnflowError):
    pass


class Singular(KnflowError):
    pass


class UnknownPresentation(KnflowError, KeyError):
    pass


class BallTooLarge(KnflowError):
    pass


class InvalidRepresentation(KnflowError, ValueError):
    pass


class NumericalBreakdown(KnflowError):
    """Line search could not find a descending step above the step floor."""


class NotInKempfNessSet(KnflowError):
    pass


class FlowNotConverged(KnflowError):
    pass


class ConsistencyWarning(UserWarning):
    """A cross-check between two characterizations of the same set disagreed."""
