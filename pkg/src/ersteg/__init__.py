"""JPEG-coefficient-domain embedding that survives one recompression.

The package splits into three layers: a deterministic JPEG model
(compress / decompress / recompress and the file codec), two
interchangeable bit-embedding codes (a polar-code list search and a
syndrome trellis), and the sequential 64-lattice pipeline that turns
per-coefficient recompression behavior into wet/dry constraints the
codes can honor exactly.
"""

from .codes import PolarStegoCode, StegoCode, SyndromeTrellisCode, make_code
from .errorless import (
    EmbedReport,
    channel_stats,
    embed,
    extract,
    verify_roundtrip,
)
from .errors import (
    CapacityError,
    EmbeddingError,
    ErstegError,
    InputOutputError,
    JpegFormatError,
    MalformedMarkerError,
    TruncatedStreamError,
    UnsupportedJpegError,
    UsageError,
    WetFlipError,
)
from .jpeg_file import parse_jpeg, read_jpeg_file, write_jpeg, write_jpeg_file
from .jpeg_model import (
    PixelImage,
    QuantTable,
    QuantizedImage,
    compress,
    decompress,
    nzac_count,
    qtable_from_qf,
    recompress,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "EmbedReport",
    "EmbeddingError",
    "ErstegError",
    "InputOutputError",
    "JpegFormatError",
    "MalformedMarkerError",
    "PixelImage",
    "PolarStegoCode",
    "QuantTable",
    "QuantizedImage",
    "StegoCode",
    "SyndromeTrellisCode",
    "TruncatedStreamError",
    "UnsupportedJpegError",
    "UsageError",
    "WetFlipError",
    "channel_stats",
    "compress",
    "decompress",
    "embed",
    "extract",
    "make_code",
    "nzac_count",
    "parse_jpeg",
    "qtable_from_qf",
    "read_jpeg_file",
    "recompress",
    "verify_roundtrip",
    "write_jpeg",
    "write_jpeg_file",
]
