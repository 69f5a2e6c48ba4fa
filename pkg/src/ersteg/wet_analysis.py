"""Wet-paper solvability analysis and the failure-probability experiments.

Three layers of machinery:

* involvement curves: the per-bit element counts both codes advertise at
  a given (n, m), used to compare wet tolerance across payloads;
* exact solvability tooling over small n: extraction matrices, the
  instance-level minimum involvement (smallest support over the row
  space), a rank test for a given wet set, and a literal brute-force
  oracle that enumerates every stego vector;
* the Monte-Carlo wet-flip probability grid over (wet ratio, dry
  payload) cells.

A wet set S admits solutions for every cover and message exactly when no
nonzero row-space vector of the extraction matrix has its support inside
S; sets smaller than the minimum support weight therefore never block.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import spc, stc
from .codes import StegoCode
from .errors import CapacityError, UsageError, WetFlipError

PROFILES = ("constant", "square")


def lm_curve_polar(n: int, ms) -> np.ndarray:
    return np.array([spc.l_m_polar(n, int(m)) for m in ms], dtype=np.int64)


def lm_curve_stc(n: int, ms, h: int = 10) -> np.ndarray:
    return np.array([stc.l_m_stc(n, int(m), h) for m in ms], dtype=np.int64)


def spc_extraction_matrix(n: int, m: int) -> np.ndarray:
    """Rows are the frozen-set generator columns: msg = y @ A.T over GF(2)."""
    g = spc.generator_matrix(n)
    frozen = spc.select_frozen(spc.bhattacharyya_profile(n, m / n), m)
    return np.ascontiguousarray(g[:, frozen].T)


def stc_extraction_matrix(n: int, m: int, sub: stc.StcSubmatrix) -> np.ndarray:
    return stc.parity_check_dense(sub, n, m)


def _row_ints(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint8) & 1
    m, n = a.shape
    if n > 62:
        raise UsageError("bitset analysis supports n <= 62")
    w = (1 << np.arange(n, dtype=np.int64))
    return (a.astype(np.int64) * w[None, :]).sum(axis=1)


@njit(cache=True)
def _min_rowspace_weight(rows, n):
    """Smallest support over all 2^m - 1 nonzero row combinations,
    walked in Gray-code order so each step is one xor."""
    m = rows.size
    best = n + 1
    v = np.int64(0)
    g_prev = np.int64(0)
    for i in range(1, 1 << m):
        gi = np.int64(i ^ (i >> 1))
        diff = gi ^ g_prev
        b = 0
        while (diff >> b) & 1 == 0:
            b += 1
        v ^= rows[b]
        g_prev = gi
        x = v
        c = 0
        while x:
            x &= x - 1
            c += 1
        if 0 < c < best:
            best = c
    return best


def instance_l_m(a: np.ndarray) -> int:
    """Minimum number of elements whose values pin down some message
    combination; wet sets smaller than this never block embedding."""
    rows = _row_ints(a)
    return int(_min_rowspace_weight(rows, int(a.shape[1])))


@njit(cache=True)
def _scan_unsolvable(rows, n, wmax):
    """Count wet masks of weight <= wmax whose dry columns drop rank.

    Returns (masks visited, blocking masks, example blocking mask or -1).
    """
    m = rows.size
    full = (np.int64(1) << n) - 1
    piv = np.zeros(m, dtype=np.int64)
    visited = np.int64(0)
    blocking = np.int64(0)
    example = np.int64(-1)
    for mask in range(1 << n):
        x = mask
        c = 0
        while x:
            x &= x - 1
            c += 1
        if c > wmax:
            continue
        visited += 1
        drym = full & ~np.int64(mask)
        rank = 0
        for i in range(m):
            r = rows[i] & drym
            for j in range(rank):
                if r & (piv[j] & -piv[j]):
                    r ^= piv[j]
            if r != 0:
                piv[rank] = r
                rank += 1
        if rank < m:
            blocking += 1
            if example < 0:
                example = mask
    return visited, blocking, example


def scan_wet_subsets(a: np.ndarray, wmax: int):
    """Exhaustively test every wet subset of size <= wmax.

    Returns (visited, blocking, example_mask); blocking == 0 certifies a
    wet-safe solution exists for every cover, message and such subset.
    """
    rows = _row_ints(a)
    return tuple(
        int(v) for v in _scan_unsolvable(rows, int(a.shape[1]), int(wmax))
    )


def _solvable_rank_py(rows: np.ndarray, n: int, wet_mask: int) -> bool:
    full = (1 << n) - 1
    drym = full & ~wet_mask
    piv = []
    for r0 in rows:
        r = int(r0) & drym
        for p in piv:
            if r & (p & -p):
                r ^= p
        if r:
            piv.append(r)
    return len(piv) == rows.size


def solvable_for_all(a: np.ndarray, wet_mask: int) -> bool:
    """True when every cover/message pair has a solution fixing the wet
    columns; equivalent to the dry columns keeping full rank."""
    return _solvable_rank_py(_row_ints(a), int(a.shape[1]), int(wet_mask))


def solvable_bruteforce(a: np.ndarray, wet_mask: int) -> bool:
    """Literal oracle: enumerate all 2^n stego vectors and demand every
    (wet-restriction, syndrome) pair occurs.  n <= 16."""
    a = np.asarray(a, dtype=np.uint8) & 1
    m, n = a.shape
    if n > 16:
        raise UsageError("literal enumeration supports n <= 16")
    ys = np.arange(1 << n, dtype=np.int64)
    bits = ((ys[:, None] >> np.arange(n)[None, :]) & 1).astype(np.uint8)
    synd = (bits @ a.T) & 1
    skey = synd.astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))
    wet_cols = [i for i in range(n) if (wet_mask >> i) & 1]
    wkey = bits[:, wet_cols].astype(np.int64) @ (
        1 << np.arange(len(wet_cols), dtype=np.int64)
    )
    keys = (wkey << m) | skey
    return int(np.unique(keys).size) == 1 << (len(wet_cols) + m)


def _profile_costs(profile: str, n: int) -> np.ndarray:
    if profile == "constant":
        return np.ones(n, dtype=np.float64)
    if profile == "square":
        return (np.arange(1, n + 1, dtype=np.float64) / n) ** 2
    raise UsageError("unknown cost profile %r" % (profile,))


def pw_heatmap(
    code: StegoCode,
    profile: str,
    n: int = 4096,
    grid: int = 20,
    trials: int = 100,
    seed: int = 0,
) -> np.ndarray:
    """Monte-Carlo wet-flip probability over the (w_r, p_d) unit square.

    Cell (i, j) sits at w_r = (i+0.5)/grid, p_d = (j+0.5)/grid with
    w_n = round(w_r*n) wet elements and m = round(p_d*(n-w_n)) message
    bits; each trial draws fresh costs placement, wet positions, cover,
    message and (for the trellis coder) submatrix from a cell-local
    seeded stream.  Entry [i, j] is the fraction of trials that could not
    avoid wet elements.
    """
    base = _profile_costs(profile, n)
    code_id = 0 if code.name == "spc" else 1
    profile_id = PROFILES.index(profile)
    out = np.zeros((grid, grid), dtype=np.float64)
    for i in range(grid):
        w_r = (i + 0.5) / grid
        w_n = int(round(w_r * n))
        for j in range(grid):
            p_d = (j + 0.5) / grid
            m = int(round(p_d * (n - w_n)))
            rng = np.random.default_rng(
                np.random.SeedSequence((seed, code_id, profile_id, i, j))
            )
            fails = 0
            for _ in range(trials):
                rho = base[rng.permutation(n)]
                wet_pos = rng.choice(n, size=w_n, replace=False)
                rho[wet_pos] = np.inf
                x = rng.integers(0, 2, n, dtype=np.uint8)
                if m == 0:
                    continue
                msg = rng.integers(0, 2, m, dtype=np.uint8)
                try:
                    code.embed(x, rho, msg, rng)
                except (WetFlipError, CapacityError):
                    fails += 1
            out[i, j] = fails / trials
    return out


def zero_cell_count(pw: np.ndarray) -> int:
    return int(np.count_nonzero(pw == 0.0))
