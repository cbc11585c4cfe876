"""Exception hierarchy shared by every module."""


class SmallEigError(Exception):
    """Base class for all solver errors."""


class NonPositiveInput(SmallEigError, ValueError):
    pass


class NonPositiveParameter(SmallEigError, ValueError):
    pass


class ParameterOutOfRange(SmallEigError, ValueError):
    pass


class PrecisionInsufficient(SmallEigError):
    """The working precision cannot meet a stated accuracy requirement.

    ``required_bits`` is filled in when the caller knows it.
    """

    def __init__(self, message, required_bits=None):
        super().__init__(message)
        self.required_bits = required_bits


class NotHessenberg(SmallEigError, ValueError):
    pass


class ZeroReflectorVector(SmallEigError, ValueError):
    pass


class EmptyShiftList(SmallEigError, ValueError):
    pass


class SingularEncounter(SmallEigError):
    """A shift landed numerically on the spectrum (some R_nn is exactly 0)."""


class RequiresViolation(SmallEigError, ValueError):
    pass


class DecoupleBudgetExceeded(SmallEigError):
    pass


class RetryBudgetExceeded(SmallEigError):
    pass


class ZeroMatrix(SmallEigError, ValueError):
    pass


class MatrixFormatError(SmallEigError, ValueError):
    pass


class OracleNonConvergence(SmallEigError):
    pass


class CardinalityMismatch(SmallEigError, ValueError):
    pass


class DefectiveOrClustered(SmallEigError):
    pass


class GridTooCoarse(SmallEigError, ValueError):
    pass


class TooFewEigenvalues(SmallEigError, ValueError):
    pass
