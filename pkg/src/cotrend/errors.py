"""Exception types shared across the package.

Each maps onto a CLI exit code (see :mod:`cotrend.cli`).
"""


class CotrendError(Exception):
    """Base class for all package errors."""


class DomainError(CotrendError, ValueError):
    """An argument lies outside the domain of a function."""


class DimensionError(CotrendError, ValueError):
    """Array shapes are inconsistent with each other or with a precondition."""


class DataError(CotrendError, ValueError):
    """Input data could not be parsed or is incomplete."""

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class NumericalError(CotrendError, ArithmeticError):
    """A numerical procedure failed (singular matrix, non-convergence)."""


class SingularMomentError(NumericalError):
    """A moment matrix is too ill-conditioned to invert."""

    def __init__(self, name, condition, detail=None):
        message = f"moment matrix {name} is numerically singular (condition number {condition:.3g})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.name = name
        self.condition = condition


class SingularGramError(NumericalError):
    """Repeated singular Gram matrices while simulating Brownian functionals."""


class MissingCriticalValueError(CotrendError, KeyError):
    """A critical-value lookup found no entry for the requested key."""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing critical value"
