"""Exception hierarchy shared by every flopdt module."""


class FlopDTError(Exception):
    """Base class for all errors raised by flopdt."""


class CapacityError(FlopDTError):
    """A cyclotomic order exceeds the configured cap."""


class DomainError(FlopDTError, ValueError):
    """An operation was applied outside its mathematical domain."""


class UsageError(FlopDTError, ValueError):
    """Inputs are structurally incompatible (lattice mismatch, bad exponents)."""


class PrecisionError(FlopDTError):
    """A coefficient was requested beyond the range a series knows exactly."""


class ChamberError(DomainError):
    """The grading does not make an expansion well defined."""


class ConsistencyError(FlopDTError):
    """An internal identity that must hold exactly was violated."""


class ParseError(FlopDTError, ValueError):
    """A configuration or series document failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
