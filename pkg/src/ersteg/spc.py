"""Polar syndrome coding for payload-limited binary embedding.

The generator is the bit-reversed Kronecker power G = B F^s with
F = [[1,0],[1,1]]; G is an involution, so the receiver recovers
u = y G with one butterfly pass and reads the message off the frozen
set.  The frozen set holds the m least reliable positions of an erasure
design with parameter m/n, matching what the list search at the sender
treats as forced leaves.  The sender turns per-element flip costs into
flip probabilities through the usual Gibbs form, runs the list search
over channel LLRs, and keeps the surviving codeword with the smallest
realized cost, so wet elements (infinite cost) are never flipped as long
as any surviving path avoids them.
"""

from __future__ import annotations

import math

import numpy as np

from ._scl import scl_run
from .embedding_math import LAMBDA_LO, pi_lambda, solve_lambda
from .errors import CapacityError, UsageError, WetFlipError

LLR_MAX = 300.0


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def bit_reverse_perm(n: int) -> np.ndarray:
    if not _is_pow2(n):
        raise UsageError("length must be a power of two")
    s = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(s):
        rev |= ((idx >> b) & 1) << (s - 1 - b)
    return rev


def gf2_butterfly(bits: np.ndarray) -> np.ndarray:
    """v -> v F^s over GF(2) along the last axis (in a fresh array)."""
    # the stage views below need C layout; fancy-indexed inputs may arrive
    # F-ordered and np.array would keep that
    x = np.ascontiguousarray(bits, dtype=np.uint8) & 1
    n = x.shape[-1]
    if not _is_pow2(n):
        raise UsageError("length must be a power of two")
    step = n
    while step > 1:
        half = step >> 1
        v = x.reshape(-1, step)
        v[:, :half] ^= v[:, half:]
        step = half
    return x


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """v -> v G with G = B F^s; self-inverse."""
    x = np.asarray(bits, dtype=np.uint8)
    perm = bit_reverse_perm(x.shape[-1])
    return gf2_butterfly(x[..., perm])


def generator_matrix(n: int) -> np.ndarray:
    """Dense G for analysis-scale n."""
    return polar_transform(np.eye(n, dtype=np.uint8))


def bhattacharyya_profile(n: int, alpha: float) -> np.ndarray:
    """Erasure-design reliabilities for the natural leaf order.

    Index 0 is the worst synthesized channel (all-minus branch).
    """
    if not _is_pow2(n):
        raise UsageError("length must be a power of two")
    if not (0.0 <= alpha <= 1.0):
        raise UsageError("design parameter must lie in [0, 1]")
    z = np.array([alpha], dtype=np.float64)
    while z.size < n:
        nz = np.empty(2 * z.size, dtype=np.float64)
        nz[0::2] = 2.0 * z - z * z
        nz[1::2] = z * z
        z = nz
    return z


def select_frozen(z: np.ndarray, m: int) -> np.ndarray:
    """Indices of the m largest reliabilities-to-erase, ties to the lower
    index, returned sorted ascending; message bit j sits at the j-th."""
    z = np.asarray(z, dtype=np.float64)
    if not (0 <= m <= z.size):
        raise UsageError("message length out of range")
    order = np.argsort(-z, kind="stable")
    return np.sort(order[:m])


def l_m_polar(n: int, m: int) -> int:
    """Worst-case count of elements a receiver must read per message bit:
    the smallest generator-column weight over the frozen set."""
    if not _is_pow2(n):
        raise UsageError("length must be a power of two")
    if not (1 <= m <= n):
        raise UsageError("need 1 <= m <= n")
    s = n.bit_length() - 1
    c = 0
    for j in range(s + 1):
        c += math.comb(s, j)
        if c >= m:
            return 1 << (s - j)
    raise AssertionError("unreachable for m <= n")


def llr_from_parity(parity: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Channel LLR log P(bit 0)/P(bit 1) for observed cover parities and
    flip probabilities, clamped to +-LLR_MAX (wet elements have p = 0 and
    saturate)."""
    parity = np.asarray(parity, dtype=np.int64) & 1
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0) or np.any(p > 0.5):
        raise UsageError("flip probabilities must lie in [0, 0.5]")
    with np.errstate(divide="ignore"):
        mag = np.where(p > 0, np.log((1.0 - p) / np.where(p > 0, p, 1.0)), np.inf)
    llr = np.where(parity == 1, -mag, mag)
    return np.clip(llr, -LLR_MAX, LLR_MAX)


def spc_embed(cover_bits, rho, msg, list_size: int = 6) -> np.ndarray:
    """Stego bits y with (y G) restricted to the frozen set equal to msg.

    Keeps the cheapest surviving codeword under the true costs; raises
    WetFlipError when every survivor flips a wet element and
    CapacityError when the message cannot fit the dry elements at all.
    """
    x = np.asarray(cover_bits).astype(np.uint8).ravel() & 1
    rho = np.asarray(rho, dtype=np.float64).ravel()
    msg = np.asarray(msg).astype(np.uint8).ravel() & 1
    n, m = x.size, msg.size
    if not _is_pow2(n):
        raise UsageError("cover length must be a power of two")
    if rho.size != n:
        raise UsageError("costs must match the cover length")
    if np.any(np.isnan(rho)) or np.any(rho < 0):
        raise UsageError("costs must be nonnegative")
    if int(list_size) < 1:
        raise UsageError("list size must be at least 1")
    if m == 0:
        return x.copy()
    if m > n:
        raise CapacityError("%d message bits exceed %d elements" % (m, n))

    dry = np.isfinite(rho)
    ndry = int(dry.sum())
    if m > ndry:
        raise CapacityError("%d message bits exceed %d dry elements" % (m, ndry))
    # m == ndry leaves no entropy slack for the solver; the flat-probability
    # limit is the right design point there
    lam = LAMBDA_LO if m == ndry else solve_lambda(rho, m)
    p = pi_lambda(rho, lam)
    llr = llr_from_parity(x, p)

    frozen = select_frozen(bhattacharyya_profile(n, m / n), m)
    mask = np.zeros(n, dtype=np.uint8)
    vals = np.zeros(n, dtype=np.uint8)
    mask[frozen] = 1
    vals[frozen] = msg

    cw, pms, na = scl_run(np.ascontiguousarray(llr), mask, vals, int(list_size))

    best = -1
    best_cost = np.inf
    best_pm = np.inf
    for i in range(na):
        flips = cw[i] != x
        cost = float(rho[flips].sum())
        if cost < best_cost or (cost == best_cost and pms[i] < best_pm):
            best, best_cost, best_pm = i, cost, pms[i]
    if best < 0 or not np.isfinite(best_cost):
        raise WetFlipError("every surviving path flips a wet element")
    return np.ascontiguousarray(cw[best])


def spc_extract(stego_bits, m: int) -> np.ndarray:
    """Message bits from stego parities: one butterfly, read the frozen set."""
    y = np.asarray(stego_bits).astype(np.uint8).ravel() & 1
    n = y.size
    if not _is_pow2(n):
        raise UsageError("stego length must be a power of two")
    if not (0 <= m <= n):
        raise UsageError("message length out of range")
    if m == 0:
        return np.zeros(0, dtype=np.uint8)
    u = polar_transform(y)
    frozen = select_frozen(bhattacharyya_profile(n, m / n), m)
    return u[frozen]
