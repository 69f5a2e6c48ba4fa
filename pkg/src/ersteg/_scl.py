"""Successive-cancellation list search core for the polar syndrome coder.

Per tree depth d (0 = channel, s = leaves) a pool of banks holds the
per-path soft plane P (n >> d log-likelihood ratios) and bit plane C
(pairs C[beta][0..1], interleaved as 2*beta + b).  Paths share banks
through a reference-counted indirection table and copy only on write, so
a list of size L costs O(L n log n) per codeword instead of O(L n^2).

Conventions: channel LLRs enter at depth 0 in physical order, leaves are
visited in natural u-order, and each surviving path's codeword sits in
its depth-0 bit plane (slot 0), again in physical order.  Everything is
deterministic: metric ties break on (parent slot, keep-hard-decision
first) and clones take the lowest free slot.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _f(a, b):
    # min-sum box-plus; an exact zero counts as nonnegative
    m = abs(a)
    mb = abs(b)
    if mb < m:
        m = mb
    if (a < 0.0) != (b < 0.0):
        return -m
    return m


@njit(cache=True)
def _alloc(d, ref, fstack, ftop):
    t = ftop[d] - 1
    k = fstack[d, t]
    ftop[d] = t
    ref[d, k] = 1
    return k


@njit(cache=True)
def _release(d, k, ref, fstack, ftop):
    r = ref[d, k] - 1
    ref[d, k] = r
    if r == 0:
        fstack[d, ftop[d]] = k
        ftop[d] += 1


@njit(cache=True)
def _own(d, p, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off):
    """Make path p sole owner of its depth-d bank, copying if shared."""
    k = ptb[d, p]
    if ref[d, k] == 1:
        return k
    ref[d, k] -= 1
    k2 = _alloc(d, ref, fstack, ftop)
    ln = n >> d
    ps = p_off[d] + k * ln
    pd = p_off[d] + k2 * ln
    for i in range(ln):
        P_buf[pd + i] = P_buf[ps + i]
    cs = c_off[d] + k * 2 * ln
    cd = c_off[d] + k2 * 2 * ln
    for i in range(2 * ln):
        C_buf[cd + i] = C_buf[cs + i]
    ptb[d, p] = k2
    return k2


@njit(cache=True)
def scl_run(llr, frozen_mask, leaf_bits, list_size):
    """Run the list search; returns (codewords, path metrics, count).

    llr: float64[n], n a power of two, channel LLRs in physical order.
    frozen_mask: uint8[n], 1 where the leaf is forced to leaf_bits[phi].
    Row i < count of the output holds the codeword of the i-th surviving
    path (slot order); its metric is the sum of |LLR| over leaf decisions
    made against the channel's hard read.
    """
    n = llr.size
    s = 0
    while (1 << s) < n:
        s += 1
    L = int(list_size)
    NB = 2 * L + 2

    p_off = np.zeros(s + 1, dtype=np.int64)
    c_off = np.zeros(s + 1, dtype=np.int64)
    ap = 0
    ac = 0
    for d in range(s + 1):
        p_off[d] = ap
        c_off[d] = ac
        ap += NB * (n >> d)
        ac += NB * 2 * (n >> d)
    P_buf = np.zeros(ap, dtype=np.float64)
    C_buf = np.zeros(ac, dtype=np.uint8)

    ptb = np.zeros((s + 1, L), dtype=np.int32)
    ref = np.zeros((s + 1, NB), dtype=np.int32)
    fstack = np.zeros((s + 1, NB), dtype=np.int32)
    ftop = np.zeros(s + 1, dtype=np.int32)
    for d in range(s + 1):
        for i in range(NB):
            fstack[d, i] = i
        ftop[d] = NB

    active = np.zeros(L, dtype=np.bool_)
    pm = np.full(L, np.inf)
    for d in range(s + 1):
        ptb[d, 0] = _alloc(d, ref, fstack, ftop)
    active[0] = True
    pm[0] = 0.0
    base0 = p_off[0] + ptb[0, 0] * n
    for i in range(n):
        P_buf[base0 + i] = llr[i]

    hard = np.zeros(L, dtype=np.uint8)
    pen = np.zeros(L, dtype=np.float64)
    cand_pm = np.zeros(2 * L, dtype=np.float64)
    cand_id = np.zeros(2 * L, dtype=np.int64)
    surv0 = np.zeros(L, dtype=np.bool_)
    surv1 = np.zeros(L, dtype=np.bool_)
    pm0 = np.zeros(L, dtype=np.float64)
    pm1 = np.zeros(L, dtype=np.float64)

    for phi in range(n):
        # refresh the soft planes touched by this phase
        if phi == 0:
            d_lo = 1
            use_g = False
        else:
            t = 0
            x = phi
            while x & 1 == 0:
                t += 1
                x >>= 1
            d_lo = s - t
            use_g = True
        for p in range(L):
            if not active[p]:
                continue
            for d in range(d_lo, s + 1):
                ln = n >> d
                kw = _own(d, p, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off)
                kr = ptb[d - 1, p]
                pr = p_off[d - 1] + kr * 2 * ln
                pw = p_off[d] + kw * ln
                cw = c_off[d] + kw * 2 * ln
                if use_g and d == d_lo:
                    # odd phase at the chain root: fold in the stored
                    # even-phase bit
                    for b in range(ln):
                        a = P_buf[pr + 2 * b]
                        c = P_buf[pr + 2 * b + 1]
                        if C_buf[cw + 2 * b] == 1:
                            P_buf[pw + b] = c - a
                        else:
                            P_buf[pw + b] = c + a
                else:
                    for b in range(ln):
                        P_buf[pw + b] = _f(P_buf[pr + 2 * b], P_buf[pr + 2 * b + 1])

        slot = phi & 1
        if frozen_mask[phi] == 1:
            bv = leaf_bits[phi]
            for p in range(L):
                if not active[p]:
                    continue
                lp = P_buf[p_off[s] + ptb[s, p]]
                if (lp < 0.0) != (bv == 1):
                    pm[p] += abs(lp)
                kw = _own(s, p, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off)
                C_buf[c_off[s] + kw * 2 + slot] = bv
        else:
            # fork every live path on the free bit and keep the best L
            cnt = 0
            for p in range(L):
                if not active[p]:
                    continue
                lp = P_buf[p_off[s] + ptb[s, p]]
                if lp < 0.0:
                    hard[p] = 1
                    pen[p] = -lp
                else:
                    hard[p] = 0
                    pen[p] = lp
                for br in range(2):
                    v = pm[p] + (pen[p] if br == 1 else 0.0)
                    cid = 2 * p + br
                    j = cnt
                    while j > 0 and (
                        cand_pm[j - 1] > v or (cand_pm[j - 1] == v and cand_id[j - 1] > cid)
                    ):
                        cand_pm[j] = cand_pm[j - 1]
                        cand_id[j] = cand_id[j - 1]
                        j -= 1
                    cand_pm[j] = v
                    cand_id[j] = cid
                    cnt += 1
            keep = L if cnt > L else cnt
            for p in range(L):
                surv0[p] = False
                surv1[p] = False
            for i in range(keep):
                cid = cand_id[i]
                p = cid >> 1
                if cid & 1 == 1:
                    surv1[p] = True
                    pm1[p] = cand_pm[i]
                else:
                    surv0[p] = True
                    pm0[p] = cand_pm[i]
            # drop the dead before cloning so slots and banks recycle
            for p in range(L):
                if active[p] and not surv0[p] and not surv1[p]:
                    for d in range(s + 1):
                        _release(d, ptb[d, p], ref, fstack, ftop)
                    active[p] = False
                    pm[p] = np.inf
            for p in range(L):
                if surv0[p] and surv1[p]:
                    q = 0
                    while active[q]:
                        q += 1
                    for d in range(s + 1):
                        k = ptb[d, p]
                        ptb[d, q] = k
                        ref[d, k] += 1
                    active[q] = True
                    pm[q] = pm1[p]
                    kq = _own(s, q, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off)
                    C_buf[c_off[s] + kq * 2 + slot] = 1 - hard[p]
                    pm[p] = pm0[p]
                    kp = _own(s, p, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off)
                    C_buf[c_off[s] + kp * 2 + slot] = hard[p]
                elif surv0[p]:
                    pm[p] = pm0[p]
                    kp = _own(s, p, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off)
                    C_buf[c_off[s] + kp * 2 + slot] = hard[p]
                elif surv1[p]:
                    pm[p] = pm1[p]
                    kp = _own(s, p, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off)
                    C_buf[c_off[s] + kp * 2 + slot] = 1 - hard[p]

        if slot == 1:
            # fold finished bit pairs toward the channel
            for p in range(L):
                if not active[p]:
                    continue
                d = s
                ph = phi
                while True:
                    psi = ph >> 1
                    ws = psi & 1
                    ks = ptb[d, p]
                    cs = c_off[d] + ks * 2 * (n >> d)
                    kw = _own(
                        d - 1, p, n, ptb, ref, fstack, ftop, P_buf, C_buf, p_off, c_off
                    )
                    cw = c_off[d - 1] + kw * 2 * (n >> (d - 1))
                    for b in range(n >> d):
                        va = C_buf[cs + 2 * b]
                        vb = C_buf[cs + 2 * b + 1]
                        C_buf[cw + 4 * b + ws] = va ^ vb
                        C_buf[cw + 4 * b + 2 + ws] = vb
                    if (psi & 1) == 1 and d > 1:
                        d -= 1
                        ph = psi
                    else:
                        break

    out = np.zeros((L, n), dtype=np.uint8)
    pms = np.full(L, np.inf)
    na = 0
    for p in range(L):
        if not active[p]:
            continue
        k = ptb[0, p]
        base = c_off[0] + k * 2 * n
        for b in range(n):
            out[na, b] = C_buf[base + 2 * b]
        pms[na] = pm[p]
        na += 1
    return out, pms, na
