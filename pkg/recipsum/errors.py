"""
Exceptions raised by recipsum.

Every error derives from :class:`RecipsumError` and from the builtin
exception a caller would naturally catch, so ``except ValueError`` keeps
working for bad input.

>>> issubclass(DomainError, ValueError)
True
>>> try:
...     raise DivisionByZero(0, (3,))
... except ZeroDivisionError as err:
...     print(err)
||L_1 q|| = 0 for q = (3,)
"""


class RecipsumError(Exception):
    """Base class of all recipsum errors."""


class DomainError(RecipsumError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecondViolation(RecipsumError, ValueError):
    """A documented precondition of an operation does not hold."""


class NotInRegion(RecipsumError, ValueError):
    """A point handed to point location is not in the region."""


class ConfigError(RecipsumError, ValueError):
    """Invalid command line or environment configuration."""


class MixedFieldError(RecipsumError, ValueError):
    """Exact arithmetic was demanded across incompatible quadratic fields."""


class DivisionByZero(RecipsumError, ZeroDivisionError):
    """A distance to the nearest integer vanished inside a reciprocal."""

    def __init__(self, row, q):
        self.row = row
        self.q = tuple(q)
        super(DivisionByZero, self).__init__(
            "||L_%d q|| = 0 for q = %s" % (row + 1, self.q))

    def __reduce__(self):
        return self.__class__, (self.row, self.q)


class BudgetExceeded(RecipsumError, RuntimeError):
    """An enumeration went past its work budget."""

    def __init__(self, what, budget, spent=None):
        self.what = what
        self.budget = budget
        self.spent = spent
        msg = "%s exceeded the budget of %d steps" % (what, budget)
        if spent is not None:
            msg += " (%d requested)" % spent
        super(BudgetExceeded, self).__init__(msg)

    def __reduce__(self):
        # rebuild from the fields so the error survives worker processes
        return self.__class__, (self.what, self.budget, self.spent)


class InvariantViolation(RecipsumError, RuntimeError):
    """A certified identity or inequality failed."""
