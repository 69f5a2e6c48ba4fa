"""Payload-limited-sender math: flip probabilities, the entropy-constrained
lambda search, payload splitting and the simulated optimal embedder.

Costs are flip costs (keeping an element is free); wet elements carry
+inf and never flip.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .errors import CapacityError, UsageError

LAMBDA_LO = 1e-10
LAMBDA_HI = 1e3
ENTROPY_TOL = 1e-8
MAX_ITER = 200


def binary_entropy(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    out = np.zeros_like(p)
    inner = (p > 0) & (p < 1)
    q = p[inner]
    out[inner] = -q * np.log2(q) - (1 - q) * np.log2(1 - q)
    return out


def pi_lambda(rho: np.ndarray, lam: float) -> np.ndarray:
    """Optimal binary flip probabilities exp(-lam*rho)/(1+exp(-lam*rho)).

    Wet entries (rho = +inf) map to exactly 0.
    """
    if lam <= 0:
        raise UsageError("lambda must be positive")
    rho = np.asarray(rho, dtype=np.float64)
    if np.any(rho < 0):
        raise UsageError("costs must be nonnegative")
    with np.errstate(invalid="ignore"):
        p = expit(-lam * rho)
    p[~np.isfinite(rho)] = 0.0
    return p


def _entropy_at(values: np.ndarray, counts: np.ndarray, lam: float) -> float:
    return float(np.dot(counts, binary_entropy(expit(-lam * values))))


def solve_lambda(rho: np.ndarray, m: int | float, tol: float = ENTROPY_TOL) -> float:
    """Bisection for lambda with sum of binary entropies equal to m bits.

    The entropy is strictly decreasing in lambda on dry elements, so plain
    bisection on [LAMBDA_LO, LAMBDA_HI] works; the upper bracket is doubled
    until the target is enclosed.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if m <= 0:
        raise UsageError("payload must be positive")
    dry = np.isfinite(rho)
    capacity = int(dry.sum())
    if m >= capacity:
        raise CapacityError(
            "payload of %s bits does not fit %d dry elements" % (m, capacity)
        )
    # Collapse repeated cost values; profiles used for splitting are a few
    # distinct constants, which turns each bisection step into O(64).
    values, counts = np.unique(rho[dry], return_counts=True)

    lo, hi = LAMBDA_LO, LAMBDA_HI
    while _entropy_at(values, counts, hi) > m:
        hi *= 2.0
        if hi > 1e30:
            raise CapacityError("entropy floor above requested payload")
    if _entropy_at(values, counts, lo) < m:
        raise CapacityError("payload exceeds achievable entropy")

    mid = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        h = _entropy_at(values, counts, mid)
        if abs(h - m) <= tol:
            return mid
        if h > m:
            lo = mid
        else:
            hi = mid
    return mid


def split_payload(profiles: list[np.ndarray], m_total: int) -> list[int]:
    """Integer per-lattice payloads from one global lambda.

    Real payloads are the per-profile entropies at the global lambda;
    integerization is floor plus largest-remainder, ties to the lower
    index, so the parts always sum to m_total.  A part is never bumped to
    its full dry count (that would leave no slack for the code).
    """
    if m_total < 0:
        raise UsageError("total payload must be nonnegative")
    k = len(profiles)
    if m_total == 0:
        return [0] * k
    concat = np.concatenate([np.asarray(p, dtype=np.float64) for p in profiles])
    lam = solve_lambda(concat, m_total)
    real = np.array([binary_entropy(pi_lambda(p, lam)).sum() for p in profiles])
    dry = np.array([int(np.isfinite(p).sum()) for p in profiles])

    base = np.floor(real).astype(np.int64)
    frac = real - base
    short = int(m_total - base.sum())
    # sort by descending remainder, ties by lower lattice index
    order = np.lexsort((np.arange(k), -frac))
    out = base.copy()
    for idx in order:
        if short <= 0:
            break
        if out[idx] + 1 < dry[idx]:
            out[idx] += 1
            short -= 1
    if short > 0:
        # distribute leftovers anywhere with room
        for idx in np.argsort(-(dry - out)):
            while short > 0 and out[idx] + 1 < dry[idx]:
                out[idx] += 1
                short -= 1
    if short > 0:
        raise CapacityError("cannot place %d bits across lattices" % short)
    return [int(v) for v in out]


def simulate_optimal(rho: np.ndarray, m: int, rng: np.random.Generator):
    """Sample independent flips from pi_lambda; the theoretical optimum the
    coded embedders are measured against.

    Returns (flip mask, expected distortion, realized distortion).
    """
    rho = np.asarray(rho, dtype=np.float64)
    n = rho.size
    if m == 0:
        return np.zeros(n, dtype=bool), 0.0, 0.0
    lam = solve_lambda(rho, m)
    p = pi_lambda(rho, lam)
    dry = np.isfinite(rho)
    expected = float(np.dot(p[dry], rho[dry]))
    flips = rng.random(n) < p
    realized = float(rho[flips].sum()) if flips.any() else 0.0
    return flips, expected, realized
