"""Exception taxonomy. Every error class carries the process exit code the
CLI maps it to, so scripts can branch on failure category."""


class ErstegError(Exception):
    exit_code = 1


class UsageError(ErstegError):
    """Bad arguments or configuration."""

    exit_code = 2


class InputOutputError(ErstegError):
    """File system problems (missing input, unwritable output)."""

    exit_code = 3


class JpegFormatError(ErstegError):
    """Base for anything wrong with a JPEG bitstream."""

    exit_code = 4


class MalformedMarkerError(JpegFormatError):
    """Marker structure violates the baseline syntax."""


class UnsupportedJpegError(JpegFormatError):
    """Valid JPEG, but a mode outside baseline sequential grayscale."""


class TruncatedStreamError(JpegFormatError):
    """Entropy-coded data ends before the last block."""


class CapacityError(ErstegError):
    """Requested payload does not fit the dry capacity."""

    exit_code = 5


class EmbeddingError(ErstegError):
    """Embedding ran but could not produce a valid stego object."""

    exit_code = 6


class WetFlipError(EmbeddingError):
    """Every solution the code could reach flips a wet element."""
