"""Exception hierarchy shared by every qconv module."""


class QconvError(Exception):
    """Base class for qconv errors."""


class ValidationError(QconvError, ValueError):
    """Input fails a structural or physical invariant."""


class NonPhysicalError(ValidationError):
    """A matrix or table does not describe a valid quantum state."""


class DimensionCapError(QconvError):
    """Requested Hilbert-space dimension exceeds the configured cap."""


class UnsupportedError(QconvError):
    """The requested (d, n) or operation is outside supported capability."""


class NotCliffordError(QconvError):
    """A unitary fails the Clifford conjugation check."""
