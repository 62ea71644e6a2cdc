class AnnulusError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(AnnulusError, ValueError):
    """An operation was called on inputs outside its domain."""


class UnsupportedSourceError(AnnulusError, TypeError):
    """The operation needs a full map but got a string system (or vice versa)."""


class IntersectionError(PreconditionError):
    """Arcs meet where they are required to be apart."""


class HalfIntegerError(PreconditionError):
    """Nearest integer requested for a value too close to 1/2 + Z."""


class RegionError(PreconditionError):
    """An orbit left the region a bound was computed on."""


class NumericalError(AnnulusError, ArithmeticError):
    """Overflow, non-finite values, or a failed consistency identity."""
