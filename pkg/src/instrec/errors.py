"""Exception hierarchy shared across the toolkit.

Every error raised by this package derives from :class:`InstrecError`, so
callers (notably the CLI) can map any toolkit failure to a one-line
diagnostic without catching library-internal exceptions individually.
"""


class InstrecError(Exception):
    """Base class for all toolkit errors."""


class WavDecodeError(InstrecError):
    """Malformed RIFF/WAVE container; the message names the byte offset."""


class UnsupportedFormatError(InstrecError):
    """Well-formed WAV whose encoding this reader does not handle."""


class EmptySignalError(InstrecError):
    """Operation received or produced a signal with no usable samples."""


class DegenerateSignalError(InstrecError):
    """Signal has zero RMS and cannot be level-normalized."""


class SignalTooShortError(InstrecError):
    """Signal shorter than one analysis frame."""


class DimensionMismatchError(InstrecError):
    """Input vector length does not match the model's attribute count."""


class CapacityError(InstrecError):
    """Requested model size exceeds the configured storage cap."""


class ModelFormatError(InstrecError):
    """Model file is malformed, truncated, or has an unknown version."""


class ModelIncompatibilityError(InstrecError):
    """Model and input disagree on sample rate or feature layout."""


class GroundTruthError(InstrecError):
    """Ground-truth CSV is malformed; the message names the line number."""


class InstrumentMismatchError(InstrecError):
    """Annotations and ground truth disagree on the instrument set."""


class MixGenerationError(InstrecError):
    """Random mix synthesis failed despite bounded retries."""
