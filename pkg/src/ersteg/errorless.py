"""Sequential 64-lattice embedding that survives one recompression by
construction.

Each DCT mode (u, v) forms a lattice with one element per embeddable
block, so a change in one lattice touches each block at most once and
three recompressions of the whole image (unchanged, all +1, all -1)
reveal exactly how every candidate change behaves: an element admits a
step delta when the channel keeps its current value, maps value+delta to
itself, the result stays Huffman-codable, and the changed block leaves
every already-processed mode's channel value alone.  Elements admitting
neither step become wet: their value is kept and the code works against
the parity the channel will produce for them.

The payload split across lattices uses cost profiles built only from the
quantization table (one constant per mode), so the receiver reproduces
the split from the stego file plus the shared seed and total bit count;
no wetness information crosses the channel.

Extraction therefore reads the decompress-recompress output (or any
recompressed copy of the stego), not the raw stego file; the invariant
maintained here is extract(recompress(stego)) == message.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes import StegoCode
from .costs import uerd_cost
from .embedding_math import split_payload
from .errors import CapacityError, UsageError, WetFlipError
from .jpeg_model import (
    QuantizedImage,
    QuantTable,
    embeddable_block_mask,
    nzac_count,
    recompress,
)

COEF_CAP = 1023  # modified values stay within baseline Huffman categories
N_MODES = 64


@dataclass
class LatticeReport:
    mode: tuple[int, int]
    n: int
    n_coded: int
    m: int
    wet_coded: int
    flips: int


@dataclass
class EmbedReport:
    success: bool
    m_total: int
    nzac: int
    seed: int
    code: str
    error: str | None = None
    failed_mode: tuple[int, int] | None = None
    verified: bool | None = None
    lattices: list[LatticeReport] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.m_total / self.nzac if self.nzac else 0.0


def lattice_order(seed: int) -> np.ndarray:
    """Seeded visiting order of the 64 modes (mode id = 8*u + v)."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    return rng.permutation(N_MODES)


def mode_perm(seed: int, mode: int, n: int) -> np.ndarray:
    """Seeded within-lattice scatter shared by sender and receiver."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 2, mode)))
    return rng.permutation(n)


def code_rng(seed: int, mode: int) -> np.random.Generator:
    """Per-lattice stream for code-internal draws (trellis submatrix)."""
    return np.random.default_rng(np.random.SeedSequence((seed, 3, mode)))


def _q_eff(qt: QuantTable) -> np.ndarray:
    q = qt.entries.astype(np.float64)
    qe = q.copy()
    qe[0, 0] = (q.sum() - q[0, 0]) / 63.0
    return qe


def split_profiles(qt: QuantTable, order: np.ndarray, n_coded: int) -> list:
    """Receiver-computable split costs: one constant per mode, in
    visiting order, over the code-driven element count."""
    qe = _q_eff(qt)
    out = []
    for mode in order:
        u, v = divmod(int(mode), 8)
        out.append(np.full(n_coded, qe[u, v], dtype=np.float64))
    return out


def _recompress_coef(plane: np.ndarray, img: QuantizedImage) -> np.ndarray:
    return recompress(
        QuantizedImage(plane, img.qtable, img.height, img.width)
    ).coef


@dataclass
class RobustSet:
    values: np.ndarray  # current lattice values, one per embeddable block
    channel: np.ndarray  # what one recompression maps those values to
    plus_ok: np.ndarray
    minus_ok: np.ndarray

    @property
    def robust(self) -> np.ndarray:
        return self.plus_ok | self.minus_ok


def robust_set(
    plane: np.ndarray,
    img: QuantizedImage,
    mask: np.ndarray,
    u: int,
    v: int,
    processed: np.ndarray,
) -> RobustSet:
    """Directional robustness of lattice (u, v) on the given plane.

    One lattice holds at most one element per block, so recompressing the
    all-plus and all-minus variants probes every element's step in
    isolation; `processed` is the (8, 8) mask of modes whose channel
    values a step may not disturb.
    """
    a = _recompress_coef(plane, img)

    yp = plane.copy()
    slp = yp[u::8, v::8]
    vv = plane[u::8, v::8]
    bump_p = mask & (np.abs(vv + 1) <= COEF_CAP)
    slp[bump_p] += 1
    b = _recompress_coef(yp, img)

    ym = plane.copy()
    slm = ym[u::8, v::8]
    bump_m = mask & (np.abs(vv - 1) <= COEF_CAP)
    slm[bump_m] -= 1
    c = _recompress_coef(ym, img)

    nby, nbx = mask.shape
    pm = processed[None, None, :, :]
    diff_p = (b != a).reshape(nby, 8, nbx, 8).transpose(0, 2, 1, 3)
    diff_m = (c != a).reshape(nby, 8, nbx, 8).transpose(0, 2, 1, 3)
    bad_p = (diff_p & pm).any(axis=(2, 3))
    bad_m = (diff_m & pm).any(axis=(2, 3))

    av = a[u::8, v::8]
    bv = b[u::8, v::8]
    cv = c[u::8, v::8]
    keep = av == vv
    plus_ok = keep & bump_p & (bv == vv + 1) & ~bad_p
    minus_ok = keep & bump_m & (cv == vv - 1) & ~bad_m

    return RobustSet(
        values=vv[mask].copy(),
        channel=av[mask].copy(),
        plus_ok=plus_ok[mask],
        minus_ok=minus_ok[mask],
    )


def _lattice_flat(mask: np.ndarray, u: int, v: int):
    """Plane coordinates of the lattice elements, row-major block order."""
    ys, xs = np.nonzero(mask)
    return 8 * ys + u, 8 * xs + v


def initial_capacity_check(
    cover: QuantizedImage,
    order: np.ndarray,
    parts: list,
    rho_plane: np.ndarray,
    mask: np.ndarray,
):
    """Dry capacity of every loaded lattice on the untouched cover; raises
    CapacityError with the first deficit.  Returns per-mode dry counts."""
    none_processed = np.zeros((8, 8), dtype=bool)
    dry_counts = {}
    for mode, mk in zip(order, parts):
        if mk == 0:
            continue
        u, v = divmod(int(mode), 8)
        rs = robust_set(cover.coef, cover, mask, u, v, none_processed)
        rho_k = rho_plane[u::8, v::8][mask]
        dry = rs.robust & np.isfinite(rho_k)
        dry_counts[(u, v)] = int(dry.sum())
        if mk > dry_counts[(u, v)]:
            raise CapacityError(
                "mode (%d, %d) holds %d dry elements for %d bits"
                % (u, v, dry_counts[(u, v)], mk)
            )
    return dry_counts


def embed(
    cover: QuantizedImage,
    message_bits,
    seed: int,
    code: StegoCode,
    verify: bool = True,
):
    """Embed message_bits; returns (stego or None, EmbedReport).

    Raises CapacityError when the payload provably cannot fit before any
    modification is made; a failure during the sequential pass (the
    evolving robust sets starve a lattice, or the code cannot avoid a wet
    element) is reported, not raised, since it depends on the walk.
    """
    msg = np.asarray(message_bits).astype(np.uint8).ravel() & 1
    m_total = int(msg.size)
    mask = embeddable_block_mask(cover)
    nblocks = int(mask.sum())
    order = lattice_order(seed)
    report = EmbedReport(
        success=False,
        m_total=m_total,
        nzac=nzac_count(cover),
        seed=seed,
        code=code.name,
    )
    if m_total == 0:
        report.success = True
        report.verified = True
        return cover.copy(), report
    if nblocks == 0:
        raise CapacityError("image has no fully interior blocks")

    n_coded = code.coded_length(nblocks)
    profiles = split_profiles(cover.qtable, order, n_coded)
    parts = split_payload(profiles, m_total)

    rho_plane = uerd_cost(cover)
    initial_capacity_check(cover, order, parts, rho_plane, mask)

    plane = cover.coef.copy()
    processed = np.zeros((8, 8), dtype=bool)
    off = 0
    for mode, mk in zip(order, parts):
        u, v = divmod(int(mode), 8)
        if mk == 0:
            processed[u, v] = True
            continue
        rs = robust_set(plane, cover, mask, u, v, processed)
        rho_k = rho_plane[u::8, v::8][mask].copy()
        wet = ~(rs.robust & np.isfinite(rho_k))
        rho_k[wet] = np.inf

        perm = mode_perm(seed, int(mode), nblocks)
        sel = perm[:n_coded]
        cover_bits = (rs.channel[sel] & 1).astype(np.uint8)
        msg_k = msg[off : off + mk]
        try:
            stego_bits = code.embed(
                cover_bits, rho_k[sel], msg_k, code_rng(seed, int(mode))
            )
        except (CapacityError, WetFlipError) as exc:
            report.error = str(exc)
            report.failed_mode = (u, v)
            return None, report

        flip = stego_bits != cover_bits
        e = sel[flip]
        if e.size:
            cp = rs.plus_ok[e]
            cm = rs.minus_ok[e]
            if not np.all(cp | cm):
                report.error = "code flipped a wet element"
                report.failed_mode = (u, v)
                return None, report
            vv = rs.values[e]
            both = cp & cm
            delta = np.where(
                both,
                np.where(np.abs(vv - 1) < np.abs(vv + 1), -1, 1),
                np.where(cp, 1, -1),
            ).astype(np.int32)
            ry, rx = _lattice_flat(mask, u, v)
            plane[ry[e], rx[e]] = vv + delta
        report.lattices.append(
            LatticeReport(
                mode=(u, v),
                n=nblocks,
                n_coded=n_coded,
                m=mk,
                wet_coded=int(wet[sel].sum()),
                flips=int(e.size),
            )
        )
        processed[u, v] = True
        off += mk

    stego = QuantizedImage(plane, cover.qtable, cover.height, cover.width)
    report.success = True
    if verify:
        got = extract(recompress(stego), m_total, seed, code)
        report.verified = bool(np.array_equal(got, msg))
    return stego, report


def extract(
    channel_img: QuantizedImage, m_total: int, seed: int, code: StegoCode
) -> np.ndarray:
    """Read the message from the channel's output image.

    The argument is what the recompression channel delivered (already a
    decompress-compress image); parities are read directly.
    """
    if m_total < 0:
        raise UsageError("message length must be nonnegative")
    if m_total == 0:
        return np.zeros(0, dtype=np.uint8)
    mask = embeddable_block_mask(channel_img)
    nblocks = int(mask.sum())
    if nblocks == 0:
        raise CapacityError("image has no fully interior blocks")
    order = lattice_order(seed)
    n_coded = code.coded_length(nblocks)
    profiles = split_profiles(channel_img.qtable, order, n_coded)
    parts = split_payload(profiles, m_total)
    pieces = []
    for mode, mk in zip(order, parts):
        if mk == 0:
            continue
        u, v = divmod(int(mode), 8)
        vals = channel_img.coef[u::8, v::8][mask]
        perm = mode_perm(seed, int(mode), nblocks)
        bits = (vals[perm[:n_coded]] & 1).astype(np.uint8)
        pieces.append(code.extract(bits, mk, code_rng(seed, int(mode))))
    return np.concatenate(pieces)


def verify_roundtrip(
    stego: QuantizedImage, message_bits, seed: int, code: StegoCode
) -> bool:
    """Simulate the channel once and compare the extraction."""
    msg = np.asarray(message_bits).astype(np.uint8).ravel() & 1
    got = extract(recompress(stego), msg.size, seed, code)
    return bool(np.array_equal(got, msg))


def channel_stats(img: QuantizedImage) -> dict:
    """Initial per-mode robustness diagnostics of an image."""
    mask = embeddable_block_mask(img)
    nblocks = int(mask.sum())
    rho_plane = uerd_cost(img)
    none_processed = np.zeros((8, 8), dtype=bool)
    modes = []
    total_dry = 0
    for mode in range(N_MODES):
        u, v = divmod(mode, 8)
        rs = robust_set(img.coef, img, mask, u, v, none_processed)
        rho_k = rho_plane[u::8, v::8][mask]
        dry = int((rs.robust & np.isfinite(rho_k)).sum())
        total_dry += dry
        modes.append(
            {
                "mode": [u, v],
                "n": nblocks,
                "dry": dry,
                "wet_ratio": 1.0 - dry / nblocks if nblocks else 1.0,
            }
        )
    return {
        "blocks": nblocks,
        "nzac": nzac_count(img),
        "total_dry": total_dry,
        "wet_ratio": 1.0 - total_dry / (64 * nblocks) if nblocks else 1.0,
        "modes": modes,
    }
