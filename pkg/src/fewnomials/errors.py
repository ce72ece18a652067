"""Exception hierarchy shared by every module of the package."""


class FewnomialError(Exception):
    """Base class for all errors raised by :mod:`fewnomials`."""


class LengthMismatch(FewnomialError, ValueError):
    pass


class EmptyAfterRegroup(FewnomialError, ValueError):
    pass


class ZeroCoefficient(FewnomialError, ValueError):
    pass


class DimensionMismatch(FewnomialError, ValueError):
    pass


class NotUnivariate(FewnomialError, ValueError):
    pass


class SingularMatrix(FewnomialError, ValueError):
    pass


class PrereqNotMet(FewnomialError, ValueError):
    """The input does not satisfy the hypotheses needed for the normal form."""


class DegenerateMinimum(FewnomialError, ArithmeticError):
    """The minimal vertex triangle is not strictly minimal (numerically)."""


class ZeroDirection(FewnomialError, ValueError):
    pass


class NotFullDimensional(FewnomialError, ValueError):
    pass


class NoBasisFound(FewnomialError, ValueError):
    pass


class UnsupportedDimension(FewnomialError, ValueError):
    pass


class BoundOverflow(FewnomialError, OverflowError):
    pass


class FewnomialSyntaxError(FewnomialError, ValueError):
    """Parse error in a fewnomial file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InconsistentHeader(FewnomialSyntaxError):
    pass


class FileZeroCoefficient(FewnomialSyntaxError, ZeroCoefficient):
    pass
