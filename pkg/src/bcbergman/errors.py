"""Exception hierarchy shared by every module of the package."""


class BicomplexError(Exception):
    """Base class for all package errors."""


class NonFiniteValue(BicomplexError, ValueError):
    pass


class ZeroDivisorError(BicomplexError, ZeroDivisionError):
    """Raised when inverting an element of the zero-divisor set."""


class StepTooSmall(BicomplexError, ValueError):
    pass


class EmptySampleSet(BicomplexError):
    pass


class NonFiniteSample(BicomplexError):
    """An integrand returned NaN or inf at a quadrature node."""


class NegativeCoefficient(BicomplexError):
    """A self inner product has a coefficient clearly below zero."""


class OutsideDomain(BicomplexError, ValueError):
    pass


class IllConditioned(BicomplexError):
    """Monomial Gram matrix too ill-conditioned for the requested size.

    ``largest_stable_n`` carries the largest basis size whose Gram
    matrix stays below the condition threshold.
    """

    def __init__(self, message, largest_stable_n):
        super().__init__(message)
        self.largest_stable_n = largest_stable_n
