"""Exception hierarchy shared by all modules."""


class QdualityError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QdualityError, ValueError):
    """An input object violates one of its invariants."""


class ShapeError(ValidationError):
    """Dimensions of the inputs are inconsistent."""


class NotPSDError(ValidationError):
    """A matrix required to be positive semidefinite is not."""


class ZeroProbabilityError(QdualityError):
    """A conditional state was requested for a zero-probability outcome."""


class SupportError(ValidationError):
    """An operation was requested outside the support where it is defined."""


class PreconditionError(QdualityError):
    """A theorem's hypothesis is violated by the supplied inputs."""


class UnsupportedStructureError(QdualityError):
    """The fixed-point structure falls outside the cases we can decompose."""
