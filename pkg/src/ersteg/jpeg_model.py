"""Grayscale JPEG coefficient model and the local recompression oracle.

Images live in the quantized DCT domain as a single coefficient plane of
shape (8*rows, 8*cols): entry [8*by+u, 8*bx+v] is mode (u, v) of block
(by, bx).  compress/decompress use an orthonormal float DCT with
round-half-away-from-zero at both the quantizer and the pixel stage.  With
the rounding rule fixed, recompress() is a pure function and the robust set
it induces is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError

# ITU T.81 Annex K luminance table, row-major.
BASE_LUMA_QT = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)

# Orthonormal 8x8 DCT-II matrix: D @ D.T == I.
_k = np.arange(8).reshape(8, 1)
_x = np.arange(8).reshape(1, 8)
DCT_MAT = 0.5 * np.cos((2 * _x + 1) * _k * np.pi / 16)
DCT_MAT[0, :] *= 1.0 / np.sqrt(2.0)
del _k, _x

# Magnitude bound for quantized coefficients (orthonormal DCT of 8-bit
# samples cannot exceed it; AC stays <= 1023 which keeps Huffman categories
# within baseline).
COEF_BOUND = 1024


@dataclass(frozen=True)
class QuantTable:
    """64 quantizer steps, row-major, each in [1, 255]."""

    entries: np.ndarray
    qf: int | None = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64).reshape(8, 8)
        if e.min() < 1 or e.max() > 255:
            raise UsageError("quantizer steps must lie in [1, 255]")
        object.__setattr__(self, "entries", e)

    def __eq__(self, other):
        return isinstance(other, QuantTable) and np.array_equal(self.entries, other.entries)


@dataclass
class PixelImage:
    """Grayscale spatial image, samples in [0, 255]."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2:
            raise UsageError("samples must be a 2-d array")
        if s.size and (s.min() < 0 or s.max() > 255):
            raise UsageError("samples must lie in [0, 255]")
        self.samples = s.astype(np.uint8)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]


@dataclass
class QuantizedImage:
    """Quantized coefficient plane plus true pixel dimensions.

    coef has shape (8*block_rows, 8*block_cols) where the block grid covers
    ceil(height/8) x ceil(width/8); blocks extending past the true
    dimensions come from edge-replicated padding.
    """

    coef: np.ndarray
    qtable: QuantTable
    height: int
    width: int

    def __post_init__(self):
        c = np.asarray(self.coef, dtype=np.int32)
        if c.ndim != 2 or c.shape[0] % 8 or c.shape[1] % 8:
            raise UsageError("coefficient plane must be a multiple of 8 in both axes")
        eh = 8 * ((self.height + 7) // 8)
        ew = 8 * ((self.width + 7) // 8)
        if c.shape != (eh, ew):
            raise UsageError("coefficient plane does not match ceil(dims/8) block grid")
        if c.size and np.abs(c).max() > COEF_BOUND:
            raise UsageError("coefficient magnitude exceeds %d" % COEF_BOUND)
        self.coef = c

    @property
    def block_rows(self) -> int:
        return self.coef.shape[0] // 8

    @property
    def block_cols(self) -> int:
        return self.coef.shape[1] // 8

    def copy(self) -> "QuantizedImage":
        return QuantizedImage(self.coef.copy(), self.qtable, self.height, self.width)


def qtable_from_qf(qf: int) -> QuantTable:
    """Scale the base luminance table by the conventional IJG rule."""
    if not (1 <= int(qf) <= 100):
        raise UsageError("quality factor must lie in [1, 100]")
    qf = int(qf)
    scale = 5000 // qf if qf < 50 else 200 - 2 * qf
    entries = (BASE_LUMA_QT * scale + 50) // 100
    return QuantTable(np.clip(entries, 1, 255), qf=qf)


def round_half_away(x: np.ndarray) -> np.ndarray:
    # np.round ties to even; JPEG-style quantization wants ties away from 0
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _as_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3)


def _from_blocks(blocks: np.ndarray) -> np.ndarray:
    nby, nbx = blocks.shape[:2]
    return blocks.transpose(0, 2, 1, 3).reshape(8 * nby, 8 * nbx)


def pad_to_blocks(samples: np.ndarray) -> np.ndarray:
    """Edge-replicate to multiples of 8 in both axes."""
    h, w = samples.shape
    return np.pad(samples, ((0, (-h) % 8), (0, (-w) % 8)), mode="edge")


def compress(px: PixelImage, qt: QuantTable) -> QuantizedImage:
    """Level shift, orthonormal FDCT per block, quantize with ties away
    from zero."""
    padded = pad_to_blocks(px.samples).astype(np.float64) - 128.0
    blocks = _as_blocks(padded)
    spec = np.einsum("ux,ijxy,vy->ijuv", DCT_MAT, blocks, DCT_MAT, optimize=True)
    q = qt.entries.astype(np.float64)
    coef = round_half_away(spec / q).astype(np.int32)
    return QuantizedImage(_from_blocks(coef), qt, px.height, px.width)


def decompress(img: QuantizedImage) -> PixelImage:
    """Dequantize, inverse DCT, shift, round ties away from zero, clamp."""
    blocks = _as_blocks(img.coef).astype(np.float64)
    deq = blocks * img.qtable.entries.astype(np.float64)
    pix = np.einsum("xu,ijuv,yv->ijxy", DCT_MAT.T, deq, DCT_MAT.T, optimize=True)
    pix = round_half_away(pix + 128.0)
    plane = np.clip(_from_blocks(pix), 0, 255)
    return PixelImage(plane[: img.height, : img.width].astype(np.uint8))


def recompress(img: QuantizedImage) -> QuantizedImage:
    """The local one-step recompression oracle: compress(decompress(img))
    with the image's own table.  Deterministic; not idempotent in general."""
    return compress(decompress(img), img.qtable)


def embeddable_block_mask(img: QuantizedImage) -> np.ndarray:
    """Blocks fully inside the true dimensions; padded blocks are excluded
    from embedding."""
    by = np.arange(img.block_rows)
    bx = np.arange(img.block_cols)
    rows_ok = (by + 1) * 8 <= img.height
    cols_ok = (bx + 1) * 8 <= img.width
    return rows_ok[:, None] & cols_ok[None, :]


def nzac_count(img: QuantizedImage) -> int:
    """Nonzero AC coefficients over embeddable blocks, the bpnzac
    normalizer."""
    blocks = _as_blocks(img.coef)
    nz = blocks != 0
    nz[:, :, 0, 0] = False
    return int(nz[embeddable_block_mask(img)].sum())
