"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 1);
``NumericalError`` subclasses signal a numerical failure (exit code 2).
"""


class SllocError(Exception):
    """Base class for all library errors."""


class ValidationError(SllocError, ValueError):
    pass


class NumericalError(SllocError, ArithmeticError):
    pass


# problem
class BadInterval(ValidationError):
    pass


class NonPositiveCoefficient(ValidationError):
    pass


class NegativePotential(ValidationError):
    pass


class NonFiniteCoefficient(ValidationError):
    pass


class UnknownPreset(ValidationError, KeyError):
    # KeyError would otherwise quote the message
    __str__ = Exception.__str__


class ConfigError(ValidationError):
    pass


# numerics
class EvenNodeCount(ValidationError):
    pass


class TooFewNodes(ValidationError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class SingularPivot(NumericalError):
    pass


# liouville
class InverseInterpolationFailure(NumericalError):
    pass


# localization
class ZeroFunction(ValidationError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class NegativeDenominator(ValidationError):
    pass


class CrossedEnvelope(NumericalError):
    pass


# landscape
class NonPositiveLandscape(NumericalError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class DegenerateGap(ValidationError):
    pass


class OutOfWindow(ValidationError):
    pass
