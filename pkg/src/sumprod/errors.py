"""Exception hierarchy shared by every module of the lab."""


class SumProdError(Exception):
    """Base class for all errors raised by :mod:`sumprod`."""


class ZeroInRatioDenominator(SumProdError, ValueError):
    pass


class ZeroElement(SumProdError, ValueError):
    pass


class BadParams(SumProdError, ValueError):
    pass


class ParseError(SumProdError, ValueError):
    pass


class IdentityViolation(SumProdError, AssertionError):
    """An exact identity failed; this always indicates a bug."""


class PoleAtMinusOne(SumProdError, ZeroDivisionError):
    pass


class ZeroDenominator(SumProdError, ZeroDivisionError):
    pass


class DegenerateEdge(SumProdError, ValueError):
    pass


class DuplicatePoints(SumProdError, ValueError):
    pass


class SectorViolation(SumProdError, ValueError):
    pass


class NoAdmissibleClass(SumProdError, LookupError):
    def __init__(self, message, required_c=None):
        super().__init__(message)
        self.required_c = required_c


class BudgetExceeded(SumProdError, RuntimeError):
    pass
