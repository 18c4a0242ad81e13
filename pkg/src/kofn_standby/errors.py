"""Exception types raised by the library."""


class ReliabilityError(Exception):
    """Base class for all library errors."""


class ConditioningOnNullEvent(ReliabilityError, ZeroDivisionError):
    """Raised when conditioning on an event of probability zero."""


class DomainError(ReliabilityError, ValueError):
    pass


class InvalidCounts(ReliabilityError, ValueError):
    pass


class InvalidArgs(ReliabilityError, ValueError):
    pass


class UnboundedTail(ReliabilityError):
    """A component has no finite tail-sum bound, so no truncation index exists."""


class TooLarge(ReliabilityError):
    """Exhaustive enumeration would exceed the outcome budget."""


class ConditioningTooRare(ReliabilityError):
    """Rejection sampling accepted too few draws to be meaningful."""


class DimensionMismatch(ReliabilityError, ValueError):
    pass


class SpecError(ReliabilityError, ValueError):
    """Malformed system or distribution description."""
