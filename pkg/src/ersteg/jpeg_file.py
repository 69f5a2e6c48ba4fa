"""Baseline sequential grayscale JPEG reader and writer.

The embedder works on quantized coefficients, so this layer moves them
in and out of real files without touching their values: parsing never
dequantizes, writing never requantizes.  Only the profile the embedder
can guarantee is accepted - 8-bit baseline, one component, no restart
markers; anything else raises a typed error instead of a wrong answer.

Files produced here use the standard luminance Huffman tables, which
cover every value the coefficient bound allows (AC categories up to 10,
DC difference categories up to 11).
"""

from __future__ import annotations

import numpy as np

from .errors import (
    InputOutputError,
    MalformedMarkerError,
    TruncatedStreamError,
    UnsupportedJpegError,
    UsageError,
)
from .jpeg_model import QuantTable, QuantizedImage

# zigzag scan position -> row-major coefficient index
ZIGZAG = np.array(
    [
         0,  1,  8, 16,  9,  2,  3, 10,
        17, 24, 32, 25, 18, 11,  4,  5,
        12, 19, 26, 33, 40, 48, 41, 34,
        27, 20, 13,  6,  7, 14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36,
        29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46,
        53, 60, 61, 54, 47, 55, 62, 63,
    ],
    dtype=np.int64,
)

# standard luminance tables: (count of codes per length 1..16, symbols)
DC_LUMA_BITS = (0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0)
DC_LUMA_VALS = tuple(range(12))
AC_LUMA_BITS = (0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D)
AC_LUMA_VALS = (
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12,
    0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
    0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16,
    0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
    0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79,
    0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98,
    0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
    0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
    0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
    0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4,
    0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA,
    0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA,
)

_SOI, _EOI, _SOS, _DQT, _DHT, _DRI, _COM = 0xD8, 0xD9, 0xDA, 0xDB, 0xC4, 0xDD, 0xFE
_SOF0 = 0xC0


def _canonical_codes(bits, vals):
    """JPEG canonical code assignment: {symbol: (code, length)}."""
    out = {}
    code = 0
    k = 0
    for length in range(1, 17):
        for _ in range(bits[length - 1]):
            out[vals[k]] = (code, length)
            code += 1
            k += 1
        code <<= 1
    return out


class _HuffDecoder:
    """Length-indexed canonical decoder (mincode/maxcode/valptr form)."""

    def __init__(self, bits, vals):
        if sum(bits) != len(vals):
            raise MalformedMarkerError("huffman table symbol count mismatch")
        self.vals = vals
        self.mincode = [0] * 17
        self.maxcode = [-1] * 17
        self.valptr = [0] * 17
        code = 0
        k = 0
        for length in range(1, 17):
            n = bits[length - 1]
            if n:
                self.valptr[length] = k
                self.mincode[length] = code
                code += n
                k += n
                self.maxcode[length] = code - 1
            code <<= 1

    def decode(self, reader) -> int:
        code = reader.read_bit()
        for length in range(1, 17):
            if code <= self.maxcode[length]:
                return self.vals[self.valptr[length] + code - self.mincode[length]]
            code = (code << 1) | reader.read_bit()
        raise MalformedMarkerError("invalid huffman code in scan")


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, length: int):
        self.acc = (self.acc << length) | (value & ((1 << length) - 1))
        self.nbits += length
        while self.nbits >= 8:
            self.nbits -= 8
            byte = (self.acc >> self.nbits) & 0xFF
            self.out.append(byte)
            if byte == 0xFF:  # byte stuffing inside entropy-coded data
                self.out.append(0x00)
        self.acc &= (1 << self.nbits) - 1

    def finish(self) -> bytes:
        if self.nbits:
            pad = 8 - self.nbits
            self.write((1 << pad) - 1, pad)
        return bytes(self.out)


class _BitReader:
    """Entropy-coded segment reader with 0xFF00 unstuffing; stops at any
    real marker."""

    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos
        self.acc = 0
        self.nbits = 0
        self.hit_marker = False

    def _pull_byte(self) -> int:
        d = self.data
        if self.pos >= len(d):
            raise TruncatedStreamError("entropy-coded data ran out")
        b = d[self.pos]
        if b == 0xFF:
            if self.pos + 1 >= len(d):
                raise TruncatedStreamError("entropy-coded data ran out")
            nxt = d[self.pos + 1]
            if nxt == 0x00:
                self.pos += 2
                return 0xFF
            self.hit_marker = True
            raise TruncatedStreamError("marker 0xFF%02X inside scan" % nxt)
        self.pos += 1
        return b

    def read_bit(self) -> int:
        if self.nbits == 0:
            self.acc = self._pull_byte()
            self.nbits = 8
        self.nbits -= 1
        return (self.acc >> self.nbits) & 1

    def receive(self, n: int) -> int:
        v = 0
        for _ in range(n):
            v = (v << 1) | self.read_bit()
        return v


def _category(v: int) -> int:
    return int(v).bit_length() if v >= 0 else int(-v).bit_length()


def _extend(raw: int, cat: int) -> int:
    # raw values below the half range encode negative numbers
    if cat == 0:
        return 0
    if raw < (1 << (cat - 1)):
        return raw - (1 << cat) + 1
    return raw


def write_jpeg(img: QuantizedImage) -> bytes:
    """Serialize to a baseline JFIF byte string, coefficients verbatim."""
    out = bytearray(b"\xff\xd8")  # SOI
    out += b"\xff\xe0" + (16).to_bytes(2, "big") + b"JFIF\x00\x01\x01\x00"
    out += (1).to_bytes(2, "big") + (1).to_bytes(2, "big") + b"\x00\x00"

    qz = img.qtable.entries.reshape(64)[ZIGZAG]
    out += b"\xff\xdb" + (67).to_bytes(2, "big") + b"\x00"
    out += bytes(int(x) for x in qz)

    if not (1 <= img.height <= 0xFFFF and 1 <= img.width <= 0xFFFF):
        raise UsageError("image dimensions must fit in 16 bits")
    out += b"\xff\xc0" + (11).to_bytes(2, "big") + b"\x08"
    out += int(img.height).to_bytes(2, "big") + int(img.width).to_bytes(2, "big")
    out += b"\x01" + b"\x01\x11\x00"

    for cls, bits, vals in (
        (0, DC_LUMA_BITS, DC_LUMA_VALS),
        (1, AC_LUMA_BITS, AC_LUMA_VALS),
    ):
        out += b"\xff\xc4" + (3 + 16 + len(vals)).to_bytes(2, "big")
        out += bytes([cls << 4]) + bytes(bits) + bytes(vals)

    out += b"\xff\xda" + (8).to_bytes(2, "big") + b"\x01\x01\x00\x00\x3f\x00"

    dc_codes = _canonical_codes(DC_LUMA_BITS, DC_LUMA_VALS)
    ac_codes = _canonical_codes(AC_LUMA_BITS, AC_LUMA_VALS)
    bw = _BitWriter()
    blocks = img.coef.reshape(img.block_rows, 8, img.block_cols, 8)
    pred = 0
    for by in range(img.block_rows):
        for bx in range(img.block_cols):
            zz = blocks[by, :, bx, :].reshape(64)[ZIGZAG]
            dc = int(zz[0])
            diff = dc - pred
            pred = dc
            cat = _category(diff)
            if cat > 11:
                raise UsageError("DC difference %d not baseline-codable" % diff)
            code, length = dc_codes[cat]
            bw.write(code, length)
            if cat:
                bw.write(diff if diff >= 0 else diff + (1 << cat) - 1, cat)
            run = 0
            for k in range(1, 64):
                v = int(zz[k])
                if v == 0:
                    run += 1
                    continue
                while run > 15:
                    code, length = ac_codes[0xF0]  # ZRL
                    bw.write(code, length)
                    run -= 16
                cat = _category(v)
                if cat > 10:
                    raise UsageError("AC value %d not baseline-codable" % v)
                code, length = ac_codes[(run << 4) | cat]
                bw.write(code, length)
                bw.write(v if v >= 0 else v + (1 << cat) - 1, cat)
                run = 0
            if run:
                code, length = ac_codes[0x00]  # EOB
                bw.write(code, length)
    out += bw.finish()
    out += b"\xff\xd9"  # EOI
    return bytes(out)


def _read_u16(data: bytes, pos: int) -> int:
    if pos + 2 > len(data):
        raise TruncatedStreamError("header ran out")
    return (data[pos] << 8) | data[pos + 1]


def parse_jpeg(data: bytes) -> QuantizedImage:
    """Decode a baseline grayscale JPEG to its quantized coefficients.

    Only what the embedder can round-trip is admitted: 8-bit baseline
    sequential, a single component, 8-bit quantizers, no restart
    intervals.  Everything else raises UnsupportedJpegError; corrupt
    structure raises MalformedMarkerError or TruncatedStreamError.
    """
    if len(data) < 2 or data[0] != 0xFF or data[1] != _SOI:
        raise MalformedMarkerError("missing SOI marker")
    pos = 2
    qtables: dict[int, np.ndarray] = {}
    huff: dict[tuple[int, int], _HuffDecoder] = {}
    frame = None  # (height, width, tq)
    while True:
        if pos >= len(data):
            raise TruncatedStreamError("no SOS before end of data")
        if data[pos] != 0xFF:
            raise MalformedMarkerError("expected a marker at offset %d" % pos)
        while pos < len(data) and data[pos] == 0xFF:
            pos += 1  # fill bytes are legal between segments
        if pos >= len(data):
            raise TruncatedStreamError("dangling fill bytes")
        marker = data[pos]
        pos += 1

        if marker == _EOI:
            raise MalformedMarkerError("EOI before any scan")
        if marker == _SOS:
            break
        if marker == _DRI:
            raise UnsupportedJpegError("restart intervals are not supported")
        if marker in (0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB,
                      0xCD, 0xCE, 0xCF):
            kind = "progressive" if marker == 0xC2 else "non-baseline"
            raise UnsupportedJpegError("%s frame (SOF%d)" % (kind, marker - 0xC0))

        length = _read_u16(data, pos)
        if length < 2 or pos + length > len(data):
            raise TruncatedStreamError("segment 0xFF%02X overruns data" % marker)
        body = data[pos + 2 : pos + length]
        pos += length

        if marker == _DQT:
            at = 0
            while at < len(body):
                pq, tq = body[at] >> 4, body[at] & 0x0F
                at += 1
                if pq == 1:
                    raise UnsupportedJpegError("16-bit quantization table")
                if pq != 0 or tq > 3:
                    raise MalformedMarkerError("bad DQT precision/slot byte")
                if at + 64 > len(body):
                    raise MalformedMarkerError("DQT table shorter than 64 entries")
                zz = np.frombuffer(body[at : at + 64], dtype=np.uint8)
                at += 64
                nat = np.zeros(64, dtype=np.int64)
                nat[ZIGZAG] = zz
                if nat.min() < 1:
                    raise MalformedMarkerError("zero quantizer step")
                qtables[tq] = nat.reshape(8, 8)
        elif marker == _DHT:
            at = 0
            while at < len(body):
                tc, th = body[at] >> 4, body[at] & 0x0F
                at += 1
                if tc > 1 or th > 3:
                    raise MalformedMarkerError("bad DHT class/slot byte")
                if at + 16 > len(body):
                    raise MalformedMarkerError("DHT counts truncated")
                bits = tuple(body[at : at + 16])
                at += 16
                n = sum(bits)
                if at + n > len(body):
                    raise MalformedMarkerError("DHT symbols truncated")
                vals = tuple(body[at : at + n])
                at += n
                huff[(tc, th)] = _HuffDecoder(bits, vals)
        elif marker == _SOF0:
            if len(body) < 6:
                raise MalformedMarkerError("SOF0 header too short")
            if body[0] != 8:
                raise UnsupportedJpegError("%d-bit samples" % body[0])
            height = (body[1] << 8) | body[2]
            width = (body[3] << 8) | body[4]
            ncomp = body[5]
            if ncomp != 1:
                raise UnsupportedJpegError(
                    "%d components; only grayscale is supported" % ncomp
                )
            if len(body) < 6 + 3:
                raise MalformedMarkerError("SOF0 component spec truncated")
            tq = body[8]
            if height == 0 or width == 0:
                raise MalformedMarkerError("zero image dimension")
            frame = (height, width, tq)
        elif 0xE0 <= marker <= 0xEF or marker == _COM:
            continue  # APPn / comment: irrelevant to coefficients
        else:
            raise MalformedMarkerError("unexpected marker 0xFF%02X" % marker)

    if frame is None:
        raise MalformedMarkerError("SOS before SOF0")
    height, width, tq = frame
    if tq not in qtables:
        raise MalformedMarkerError("scan references missing DQT slot %d" % tq)

    length = _read_u16(data, pos)
    if length < 2 or pos + length > len(data):
        raise TruncatedStreamError("SOS header overruns data")
    body = data[pos + 2 : pos + length]
    pos += length
    if len(body) < 6 or body[0] != 1:
        raise UnsupportedJpegError("scan must cover exactly the one component")
    td, ta = body[2] >> 4, body[2] & 0x0F
    if body[3] != 0 or body[4] != 63 or body[5] != 0:
        raise UnsupportedJpegError("non-sequential spectral selection")
    if (0, td) not in huff or (1, ta) not in huff:
        raise MalformedMarkerError("scan references missing DHT slot")
    dc_dec, ac_dec = huff[(0, td)], huff[(1, ta)]

    nby, nbx = (height + 7) // 8, (width + 7) // 8
    coef = np.zeros((nby, 8, nbx, 8), dtype=np.int32)
    reader = _BitReader(data, pos)
    pred = 0
    block = np.zeros(64, dtype=np.int32)
    for by in range(nby):
        for bx in range(nbx):
            block[:] = 0
            cat = dc_dec.decode(reader)
            if cat > 11:
                raise MalformedMarkerError("DC category %d out of range" % cat)
            pred += _extend(reader.receive(cat), cat)
            block[0] = pred
            k = 1
            while k < 64:
                rs = ac_dec.decode(reader)
                r, s = rs >> 4, rs & 0x0F
                if s == 0:
                    if r == 0:
                        break  # EOB
                    if r != 15:
                        raise MalformedMarkerError("bad AC run/size symbol")
                    k += 16
                    continue
                k += r
                if k > 63:
                    raise MalformedMarkerError("AC run overflows the block")
                block[ZIGZAG[k]] = _extend(reader.receive(s), s)
                k += 1
            coef[by, :, bx, :] = block.reshape(8, 8)

    try:
        return QuantizedImage(
            coef.reshape(8 * nby, 8 * nbx),
            QuantTable(qtables[tq]),
            height,
            width,
        )
    except UsageError as exc:
        raise MalformedMarkerError(str(exc)) from exc


def read_jpeg_file(path) -> QuantizedImage:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as exc:
        raise InputOutputError("cannot read %s: %s" % (path, exc)) from exc
    return parse_jpeg(data)


def write_jpeg_file(path, img: QuantizedImage):
    data = write_jpeg(img)
    try:
        with open(path, "wb") as f:
            f.write(data)
    except OSError as exc:
        raise InputOutputError("cannot write %s: %s" % (path, exc)) from exc
