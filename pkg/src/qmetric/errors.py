"""Exception types shared across the package."""


class QmetricError(Exception):
    """Base class for every error raised by this library."""


class InputError(QmetricError):
    """Malformed data, mismatched shapes, or a violated precondition."""


class BoundViolation(QmetricError):
    """A certified inequality failed to hold within its tolerance."""


class UnsupportedSpec(QmetricError):
    """The requested seminorm spec has no implemented computation path."""
