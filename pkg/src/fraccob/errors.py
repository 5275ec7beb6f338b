"""Exception types raised across the package."""


class FraccobError(Exception):
    """Base class for all package errors."""


class DomainError(FraccobError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NonConvergence(FraccobError, ArithmeticError):
    """A series or iteration exhausted its budget before meeting tolerance."""


class DegenerateModel(FraccobError, ValueError):
    """Model coefficients make the closed-form solution undefined."""
