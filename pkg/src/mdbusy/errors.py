"""Exception hierarchy shared by every module.

Each class maps onto one CLI exit code, see :mod:`mdbusy.cli`.
"""


class MdBusyError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MdBusyError, ValueError):
    """An argument is outside the domain of the computation."""


class RangeError(MdBusyError, ArithmeticError):
    """An intermediate or final result left the floating-point range."""


class SingularityError(MdBusyError, ArithmeticError):
    """The transform was evaluated too close to one of its poles."""


class ResourceError(MdBusyError, RuntimeError):
    """The requested computation exceeds a configured size cap."""


class ConsistencyError(MdBusyError, RuntimeError):
    """Two independent methods disagree beyond their guaranteed error."""
