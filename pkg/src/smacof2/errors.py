"""Exception hierarchy for smacof2."""


class MDSError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MDSError, ValueError):
    """Malformed or invalid input data."""


class NumericError(MDSError, ArithmeticError):
    """A numerical precondition failed during computation."""


# input validation
class AsymmetricInput(InputError):
    pass


class NegativeWeight(InputError):
    pass


class AllZeroWeights(InputError):
    pass


class DisconnectedWeightGraph(InputError):
    pass


class InvalidDissimilarities(InputError):
    pass


class InvalidConfiguration(InputError):
    pass


class NotSymmetric(InputError):
    pass


class RaggedRows(InputError):
    pass


class NonSquare(InputError):
    pass


class NonNumericToken(InputError):
    pass


class UnknownDataset(InputError):
    pass


class IoFailure(MDSError, OSError):
    pass


# numerical failures
class DegenerateDenominator(NumericError):
    """Stress denominator is zero, e.g. all weighted distances are equal."""


class DegenerateConfiguration(NumericError):
    pass


class DegenerateInput(NumericError):
    pass


class SingularSystem(NumericError):
    """The shifted system ``U + E/n`` is not positive definite."""


class InsufficientPositiveEigenvalues(NumericError):
    pass


class IndefiniteMajorizer(NumericError):
    pass


class InitialStressAboveOne(NumericError):
    pass


class DirectionViolatesCondition(NumericError):
    pass


class NonDifferentiablePoint(NumericError):
    pass


class ObserverAborted(MDSError):
    """An observer callback raised; the run was abandoned."""
