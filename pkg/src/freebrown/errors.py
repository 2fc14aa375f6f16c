"""Exception types.

Input and domain problems derive from ``ValidationError`` (a ``ValueError``);
failures of the numerics themselves derive from ``NumericalFailure``.  The
CLI maps the two families to exit codes 2 and 3.
"""


class FreeBrownError(Exception):
    pass


class ValidationError(FreeBrownError, ValueError):
    pass


class NumericalFailure(FreeBrownError, ArithmeticError):
    pass


class InversionOfAtomAtZero(ValidationError):
    pass


# Same condition, raised from the S-transform side of the inversion identity.
AtomAtZero = InversionOfAtomAtZero


class PointOnSupport(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class DeltaZeroMeasure(ValidationError):
    pass


class VarianceNotNormalized(ValidationError):
    pass


class NonMonotoneS(NumericalFailure):
    pass


class QRBreakdown(NumericalFailure):
    pass


class SolverFailure(NumericalFailure):
    pass


class SingularInverseFactor(NumericalFailure):
    pass
