"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` (CLI exit code 3),
scenario problems from :class:`ScenarioError` (CLI exit code 2).
"""


class NumericalError(ArithmeticError):
    """Base class for failures raised by the numerical routines."""


class ImproperTransfer(NumericalError):
    pass


class NotHurwitz(NumericalError):
    pass


class PoleOnGrid(NumericalError):
    pass


class IntegratorPresent(NumericalError):
    pass


class UnstableSystem(NumericalError):
    pass


class ComplexPoles(NumericalError):
    pass


class RepeatedPoles(NumericalError):
    pass


class ZeroDivisor(NumericalError, ZeroDivisionError):
    pass


class SingularAtFrequency(NumericalError):
    pass


class NotApplicable(NumericalError):
    """Analytic bound evaluated outside its region of validity."""


class GridMismatch(NumericalError):
    pass


class OrderTooHigh(NumericalError):
    pass


class NotStrictlyProper(NumericalError):
    pass


class UnstableInput(NumericalError):
    pass


class WrongOrder(NumericalError):
    pass


class DCMismatch(NumericalError):
    pass


class ScenarioError(ValueError):
    """Base class for scenario ingestion failures."""


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass
