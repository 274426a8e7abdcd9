"""Exception types raised across the package."""


class JetBundleError(Exception):
    """Base class for every error raised by jetbundle."""


class ZeroDenominator(JetBundleError, ZeroDivisionError):
    pass


class PoleAtExpansionPoint(JetBundleError, ValueError):
    pass


class DegreeTooLarge(JetBundleError, ValueError):
    pass


class ZeroVector(JetBundleError, ValueError):
    pass


class ContractionOverflow(JetBundleError, ValueError):
    pass


class NotUnimodular(JetBundleError, ValueError):
    """A Mobius matrix whose determinant is not exactly 1."""


class PoleAtBasePoint(JetBundleError, ValueError):
    pass


class OrderWeightMismatch(JetBundleError, ValueError):
    pass


class BadOrder(JetBundleError, ValueError):
    pass


class BasePointAtInfinity(JetBundleError, ValueError):
    pass


class IndexOutOfRange(JetBundleError, IndexError):
    pass


class InconsistentPointCovector(JetBundleError, ValueError):
    pass


class NotScalar(JetBundleError, ArithmeticError):
    pass


class UnknownSuite(JetBundleError, KeyError):
    pass


class AtlasParseError(JetBundleError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
