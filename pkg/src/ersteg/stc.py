"""Syndrome-trellis code: banded parity-check from a small submatrix,
Viterbi embedding, syndrome extraction.

The parity-check matrix places one h x w submatrix copy per message bit,
each copy one row below the previous, truncated at row m.  Columns past
m*w are uncovered (all-zero) and the embedder leaves them at the cover
value.  Wet elements ride through the trellis at a large finite cost; a
wet flip in the winning path is reported as an explicit failure, never
returned silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import UsageError, WetFlipError

WET_COST = 1e13  # dwarfs any realizable dry path, still exact in float64


@dataclass(frozen=True)
class StcSubmatrix:
    bits: np.ndarray  # (h, w) in {0, 1}

    def __post_init__(self):
        b = np.ascontiguousarray(np.asarray(self.bits, dtype=np.uint8) & 1)
        if b.ndim != 2 or b.shape[0] < 2 or b.shape[1] < 1:
            raise UsageError("submatrix must be at least 2 x 1")
        object.__setattr__(self, "bits", b)

    @property
    def h(self) -> int:
        return self.bits.shape[0]

    @property
    def w(self) -> int:
        return self.bits.shape[1]

    def col_ints(self) -> np.ndarray:
        """Column read as integer, row r in bit r."""
        weights = (1 << np.arange(self.h, dtype=np.int64))[:, None]
        return (self.bits.astype(np.int64) * weights).sum(axis=0)


def make_submatrix(h: int, w: int, seed) -> StcSubmatrix:
    """Pseudorandom submatrix with all-ones first and last rows (every
    column gets a leading 1 and a full-height span)."""
    if h < 2:
        raise UsageError("constraint height must be at least 2")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(h, w), dtype=np.uint8)
    bits[0, :] = 1
    bits[-1, :] = 1
    return StcSubmatrix(bits)


def parity_check_dense(sub: StcSubmatrix, n: int, m: int) -> np.ndarray:
    """Materialized m x n parity-check matrix, for analysis and small-n
    oracles only (embedding walks the band implicitly)."""
    if m < 1 or n < m:
        raise UsageError("need 1 <= m <= n")
    w = n // m
    if w != sub.w:
        raise UsageError("submatrix width must equal floor(n/m)")
    h = np.zeros((m, n), dtype=np.uint8)
    for b in range(m):
        rows = min(sub.h, m - b)
        h[b : b + rows, b * w : (b + 1) * w] = sub.bits[:rows]
    return h


def l_m_stc(n: int, m: int, h: int) -> int:
    """Upper bound on elements touched per message bit: min(floor(n/m)*h, n)."""
    if m < 1 or n < m:
        raise UsageError("need 1 <= m <= n")
    return min((n // m) * h, n)


@njit(cache=True)
def _viterbi(x, cost, msg, cols, h, w):
    """Forward pass over the band plus backtrack.

    State bit r holds the running parity of check row b+r while block b is
    being processed.  At each block boundary the finished row is matched
    against its message bit and the window shifts right.  Returns stego
    bits for the m*w banded positions and the optimal cost.
    """
    m = msg.size
    nc = m * w
    size = 1 << h
    inf = np.inf

    pm = np.full(size, inf)
    pm[0] = 0.0
    pm2 = np.empty(size)
    choice = np.zeros((nc, size), dtype=np.uint8)

    for b in range(m):
        live = h if m - b >= h else m - b  # rows past m do not exist
        mask = (1 << live) - 1
        for j in range(w):
            c = b * w + j
            col = cols[c] & mask
            c0 = cost[c] if x[c] == 1 else 0.0
            c1 = cost[c] if x[c] == 0 else 0.0
            if col == 0:
                # no effect on the syndrome, keep the cover bit for free
                keep = x[c]
                for s in range(size):
                    choice[c, s] = keep
                continue
            for s in range(size):
                t = s ^ col
                if s >= t:
                    continue
                a = pm[s]
                d = pm[t]
                # ties keep the cover bit (y = 0 arm is the x value when
                # x == 0; the comparison below prefers the no-flip arm)
                v0 = a + c0
                v1 = d + c1
                if v1 < v0:
                    pm2[s] = v1
                    choice[c, s] = 1
                else:
                    pm2[s] = v0
                    choice[c, s] = 0
                v0 = d + c0
                v1 = a + c1
                if v1 < v0:
                    pm2[t] = v1
                    choice[c, t] = 1
                else:
                    pm2[t] = v0
                    choice[c, t] = 0
            tmp = pm
            pm = pm2
            pm2 = tmp
        # block boundary: row b must equal msg[b], then the window shifts
        mb = msg[b]
        half = size >> 1
        for t in range(size):
            pm2[t] = pm[(t << 1) | mb] if t < half else inf
        tmp = pm
        pm = pm2
        pm2 = tmp

    y = np.empty(nc, dtype=np.uint8)
    s = 0
    for b in range(m - 1, -1, -1):
        s = (s << 1) | msg[b]
        live = h if m - b >= h else m - b
        mask = (1 << live) - 1
        for j in range(w - 1, -1, -1):
            c = b * w + j
            bit = choice[c, s]
            y[c] = bit
            if bit == 1:
                s ^= cols[c] & mask
    return y, pm[0]


def stc_embed(
    cover_bits: np.ndarray,
    rho: np.ndarray,
    msg: np.ndarray,
    sub: StcSubmatrix,
) -> np.ndarray:
    """Minimal-cost stego bits with H @ y == msg over GF(2).

    Raises WetFlipError when the optimum flips a wet element; positions
    past the band (columns >= m*w) keep the cover value.
    """
    x = np.ascontiguousarray(np.asarray(cover_bits, dtype=np.uint8) & 1)
    msg = np.ascontiguousarray(np.asarray(msg, dtype=np.uint8) & 1)
    rho = np.asarray(rho, dtype=np.float64)
    n, m = x.size, msg.size
    if m < 1 or n < m:
        raise UsageError("need 1 <= len(msg) <= len(cover)")
    w = n // m
    if w != sub.w:
        raise UsageError("submatrix width must equal floor(n/m)")

    wet = ~np.isfinite(rho)
    cost = np.where(wet, WET_COST, rho)
    col_per_pos = np.tile(sub.col_ints(), m)

    y_band, _ = _viterbi(
        x[: m * w], np.ascontiguousarray(cost[: m * w]), msg, col_per_pos, sub.h, w
    )
    y = x.copy()
    y[: m * w] = y_band

    flipped_wet = int(np.count_nonzero((y != x) & wet))
    if flipped_wet:
        raise WetFlipError("optimal trellis path flips %d wet element(s)" % flipped_wet)
    return y


def stc_extract(stego_bits: np.ndarray, sub: StcSubmatrix, m: int) -> np.ndarray:
    """Syndrome H @ y over GF(2)."""
    y = np.asarray(stego_bits, dtype=np.uint8) & 1
    n = y.size
    if m < 1 or n < m:
        raise UsageError("need 1 <= m <= len(stego)")
    w = n // m
    if w != sub.w:
        raise UsageError("submatrix width must equal floor(n/m)")
    synd = np.zeros(m, dtype=np.int64)
    ones = np.flatnonzero(y[: m * w] == 1)
    if ones.size:
        blocks = ones // w
        offsets = ones % w
        for r in range(sub.h):
            active = sub.bits[r, offsets] == 1
            rows = blocks[active] + r
            rows = rows[rows < m]
            np.add.at(synd, rows, 1)
    return (synd & 1).astype(np.uint8)
