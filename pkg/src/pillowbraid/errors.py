"""Exception types raised across the package."""


class PillowBraidError(Exception):
    """Base class for all package errors."""


class AmbientMismatchError(PillowBraidError, ValueError):
    """Two braids (or factorizations) live in braid groups of different rank."""


class InvalidParameterError(PillowBraidError, ValueError):
    pass


class MalformedSpecError(PillowBraidError, ValueError):
    """A twist specification cannot be compiled as written."""


class InvalidStateError(PillowBraidError, ValueError):
    pass


class AuditError(PillowBraidError):
    """Dataset content disagrees with the combinatorics it is checked against."""


class InternalConsistencyError(PillowBraidError):
    pass


class InvalidInvarianceError(PillowBraidError, ValueError):
    """Exponents for an invariance element violate the class constraints."""


class UnsupportedFactorError(PillowBraidError, ValueError):
    pass


class CatalogError(PillowBraidError):
    """The catalog document is missing, unreadable or fails validation."""
