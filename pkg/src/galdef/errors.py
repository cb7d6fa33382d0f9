"""Exception types shared across the package."""


class GaldefError(Exception):
    """Base class for all package errors."""


class InvalidParameters(GaldefError, ValueError):
    """Numeric parameters violate a precondition (primality, residue conditions)."""


class NotAUnit(GaldefError, ZeroDivisionError):
    """Inversion requested for a non-unit of Z/l^K or of a truncated ring."""


class DimensionMismatch(GaldefError, ValueError):
    pass


class NotACocycle(GaldefError, ValueError):
    pass


class SchemaError(GaldefError, ValueError):
    """A data file does not match its schema; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class InsufficientCoefficients(GaldefError, ValueError):
    pass


class NotComparable(GaldefError, ValueError):
    """Two newforms lie in the same Galois orbit and cannot witness a congruence."""
