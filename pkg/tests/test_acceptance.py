"""End-to-end acceptance gate for the whole toolkit.

Nine checks covering the analytic layer (involvement curves, wet-paper
solvability, reliability recursion), the coding layer (roundtrip,
optimality, wet-flip Monte Carlo), and the full pipeline at desk scale
(errorless invariant, success-rate trend, codec fidelity).  Each test
prints exactly one

    ACCEPTANCE <k>: PASS|FAIL (<measured detail>)

line (run with -s to see them) before asserting, so a full run doubles
as a readable report.  The set takes tens of minutes, dominated by the
40k-trial wet-flip grids of check 5; use -m "not acceptance" for quick
iteration.
"""

import time

import numpy as np
import pytest

from ersteg.codes import make_code
from ersteg.corpus import success_table
from ersteg.jpeg_file import parse_jpeg, read_jpeg_file, write_jpeg
from ersteg.jpeg_model import QuantTable, QuantizedImage
from ersteg.spc import bhattacharyya_profile, spc_embed
from ersteg.stc import make_submatrix, stc_embed
from ersteg.wet_analysis import (
    instance_l_m,
    lm_curve_polar,
    lm_curve_stc,
    pw_heatmap,
    scan_wet_subsets,
    solvable_bruteforce,
    solvable_for_all,
    spc_extraction_matrix,
    stc_extraction_matrix,
    zero_cell_count,
)

pytestmark = pytest.mark.acceptance

HEATMAP_SEED = 5
TABLE_SEED = 0


def _report(k: int, ok: bool, detail: str) -> bool:
    print("ACCEPTANCE %d: %s (%s)" % (k, "PASS" if ok else "FAIL", detail))
    return ok


def _runs(values) -> list:
    """Contiguous integer runs, as (first, last) pairs."""
    out = []
    for v in values:
        if out and v == out[-1][1] + 1:
            out[-1][1] = v
        else:
            out.append([v, v])
    return [tuple(r) for r in out]


def test_acceptance_1_involvement_crossover():
    """Payload range where the polar coder's per-bit involvement count
    dominates the trellis coder's: required to be exactly m in
    [38, 3797] at n = 4096, h = 10, with strict reversal outside."""
    t0 = time.perf_counter()
    n, h, lo, hi = 4096, 10, 38, 3797
    ms = np.arange(1, n + 1)
    lp = lm_curve_polar(n, ms)
    ls = lm_curve_stc(n, ms, h)
    elapsed = time.perf_counter() - t0

    ge = lp >= ls
    inside_ok = bool(ge[lo - 1 : hi].all())
    outside = np.concatenate([~ge[: lo - 1], ~ge[hi:]])
    outside_ok = bool(outside.all())
    fast = elapsed < 1.0

    runs = _runs(ms[ge].tolist())
    ok = inside_ok and outside_ok and fast
    assert _report(
        1,
        ok,
        "advantage measured on m in %s; required all of [%d, %d] and "
        "strict reversal elsewhere; %.3fs"
        % (runs, lo, hi, elapsed),
    )


def test_acceptance_2_wet_solvability():
    """Below the instance involvement minimum, every wet subset leaves
    every (cover, message) pair embeddable: literally enumerated for
    n in {4, 8}, rank-scanned over all subsets plus spot brute checks
    at n = 16.  Both codes, all payloads, several trellis draws."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(20)
    exhaustive = scanned = spot = 0
    bad = []

    cases = []
    for n in (4, 8, 16):
        for m in range(1, n + 1):
            cases.append(("spc n=%d m=%d" % (n, m), n, spc_extraction_matrix(n, m)))
            for s in range(3):
                h = 2 + s % 2
                sub = make_submatrix(h, n // m, 1000 * n + 10 * m + s)
                cases.append(
                    ("stc n=%d m=%d h=%d s=%d" % (n, m, h, s), n,
                     stc_extraction_matrix(n, m, sub))
                )

    for label, n, a in cases:
        wmax = instance_l_m(a) - 1
        if n <= 8:
            for mask in range(1 << n):
                if bin(mask).count("1") > wmax:
                    continue
                exhaustive += 1
                if not solvable_bruteforce(a, mask):
                    bad.append((label, mask))
                if solvable_for_all(a, mask) != solvable_bruteforce(a, mask):
                    bad.append((label, mask, "rank/brute disagree"))
        else:
            visited, blocking, example = scan_wet_subsets(a, wmax)
            scanned += visited
            if blocking:
                bad.append((label, example))
            for _ in range(20):
                k = int(rng.integers(0, wmax + 1))
                mask = 0
                for p in rng.choice(n, size=k, replace=False):
                    mask |= 1 << int(p)
                spot += 1
                if not solvable_bruteforce(a, mask):
                    bad.append((label, mask, "spot"))

    ok = not bad
    assert _report(
        2,
        ok,
        "%d subsets brute-forced (n<=8), %d rank-scanned and %d "
        "spot-brute-forced (n=16), %d counterexamples%s; %.1fs"
        % (exhaustive, scanned, spot, len(bad),
           " first=%s" % (bad[0],) if bad else "", time.perf_counter() - t0),
    )


def test_acceptance_3_code_roundtrip():
    """1000 random dry instances per code at n = 4096, payloads cycling
    0.1..0.9: extracting after embedding returns the message always."""
    t0 = time.perf_counter()
    n, per_code = 4096, 1000
    failures = 0
    for ci, cname in enumerate(("spc", "stc")):
        code = make_code(cname)
        for k in range(per_code):
            rng = np.random.default_rng(np.random.SeedSequence((300, ci, k)))
            rho = rng.random(n) + 1e-3
            x = rng.integers(0, 2, n, dtype=np.uint8)
            m = int(round((k % 9 + 1) / 10 * n))
            msg = rng.integers(0, 2, m, dtype=np.uint8)
            y = code.embed(x, rho, msg, np.random.default_rng((ci, k)))
            got = code.extract(y, m, np.random.default_rng((ci, k)))
            failures += not np.array_equal(got, msg)
    ok = failures == 0
    assert _report(
        3,
        ok,
        "%d/%d roundtrips exact; %.1fs"
        % (2 * per_code - failures, 2 * per_code, time.perf_counter() - t0),
    )


_YS_CACHE = {}


def _exhaustive_min(a: np.ndarray, x, rho, msg) -> float:
    """Minimum cost over every stego vector satisfying the extraction
    constraint; 2^n enumeration, vectorized."""
    n = a.shape[1]
    if n not in _YS_CACHE:
        _YS_CACHE[n] = (
            (np.arange(1 << n, dtype=np.uint32)[:, None] >> np.arange(n)) & 1
        ).astype(np.uint8)
    ys = _YS_CACHE[n]
    sel = (((ys @ a.T.astype(np.uint32)) & 1) == msg).all(axis=1)
    return float(((ys[sel] != x) * rho).sum(axis=1).min())


def test_acceptance_4_small_n_optimality():
    """500 random instances per code at n <= 16: the returned stego's
    cost equals the exhaustive constrained minimum (polar list sized to
    cover every path)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(40)
    per_code = 500
    worst = 0.0
    bad = 0

    for _ in range(per_code):
        n = int(rng.choice([4, 8, 16]))
        m = int(rng.integers(max(1, n - 8), n + 1))
        rho = rng.random(n) + 0.01
        x = rng.integers(0, 2, n, dtype=np.uint8)
        msg = rng.integers(0, 2, m, dtype=np.uint8)
        y = spc_embed(x, rho, msg, list_size=2 ** (n - m))
        cost = float(rho[y != x].sum())
        best = _exhaustive_min(spc_extraction_matrix(n, m), x, rho, msg)
        worst = max(worst, abs(cost - best))
        bad += abs(cost - best) > 1e-9

    for _ in range(per_code):
        n = int(rng.integers(2, 17))
        m = int(rng.integers(1, n + 1))
        h = int(rng.integers(2, 5))
        sub = make_submatrix(h, n // m, rng)
        rho = rng.random(n) + 0.01
        x = rng.integers(0, 2, n, dtype=np.uint8)
        msg = rng.integers(0, 2, m, dtype=np.uint8)
        y = stc_embed(x, rho, msg, sub)
        cost = float(rho[y != x].sum())
        best = _exhaustive_min(stc_extraction_matrix(n, m, sub), x, rho, msg)
        worst = max(worst, abs(cost - best))
        bad += abs(cost - best) > 1e-9

    ok = bad == 0
    assert _report(
        4,
        ok,
        "%d/%d instances optimal, worst gap %.2e; %.1fs"
        % (2 * per_code - bad, 2 * per_code, worst, time.perf_counter() - t0),
    )


def test_acceptance_5_wet_flip_grids():
    """20x20 Monte-Carlo wet-flip probability grids, 100 trials/cell,
    n = 4096, both cost profiles: (a) the polar coder must have strictly
    more zero-probability cells than the trellis coder on each profile;
    (b) every cell with dry payload >= 0.95 must show P_w >= 0.49 for
    both codes."""
    t0 = time.perf_counter()
    grids = {}
    for cname in ("spc", "stc"):
        for profile in ("constant", "square"):
            grids[cname, profile] = pw_heatmap(
                make_code(cname), profile, n=4096, grid=20, trials=100,
                seed=HEATMAP_SEED,
            )

    zeros = {k: zero_cell_count(v) for k, v in grids.items()}
    a_ok = all(
        zeros["spc", p] > zeros["stc", p] for p in ("constant", "square")
    )

    # cell centers (j + 0.5)/20: only the last column reaches 0.95
    col = 19
    b_bad = [
        (k[0], k[1], i, float(v[i, col]))
        for k, v in grids.items()
        for i in range(20)
        if v[i, col] < 0.49
    ]
    b_ok = not b_bad

    ok = a_ok and b_ok
    assert _report(
        5,
        ok,
        "zero cells spc/stc: constant %d/%d, square %d/%d; "
        "saturated-payload column >= 0.49: %s; %.0fs"
        % (
            zeros["spc", "constant"], zeros["stc", "constant"],
            zeros["spc", "square"], zeros["stc", "square"],
            "yes" if b_ok else "no, %d cells below, e.g. %s" % (
                len(b_bad), b_bad[0],),
            time.perf_counter() - t0,
        ),
    )


@pytest.fixture(scope="module")
def corpus_table():
    return success_table(seed=TABLE_SEED)


def test_acceptance_6_errorless_invariant(corpus_table):
    """Every successful embed over the corpus grid extracts exactly
    after recompression: verified count == embedded count, no slack."""
    t0 = time.perf_counter()
    total_embedded = sum(r["embedded"] for r in corpus_table.values())
    mismatched = [
        key
        for key, r in corpus_table.items()
        if r["verified"] != r["embedded"]
    ]
    ok = not mismatched and total_embedded > 0
    assert _report(
        6,
        ok,
        "%d successful embeds across %d cells, all exact after the "
        "channel%s; table cached, %.0fs"
        % (total_embedded, len(corpus_table),
           "" if ok else "; MISMATCH at %s" % mismatched[:3],
           time.perf_counter() - t0),
    )


def test_acceptance_7_success_rate_trend(corpus_table):
    """Per (quality, payload) cell the polar pipeline succeeds at least
    as often as the trellis pipeline, and is perfect for QF <= 90."""
    from ersteg.corpus import corpus

    sizes = [px.samples.shape for px in corpus()]
    assert len(sizes) >= 20 and all(h >= 128 and w >= 128 for h, w in sizes)

    cells = sorted({(qf, rate) for qf, rate, _ in corpus_table})
    dominated = [
        (qf, rate)
        for qf, rate in cells
        if corpus_table[qf, rate, "spc"]["verified"]
        < corpus_table[qf, rate, "stc"]["verified"]
    ]
    imperfect = [
        (qf, rate)
        for qf, rate in cells
        if qf <= 90
        and corpus_table[qf, rate, "spc"]["verified"]
        != corpus_table[qf, rate, "spc"]["total"]
    ]
    ok = not dominated and not imperfect
    spc95 = [corpus_table[95, r, "spc"]["verified"] for r in (0.1, 0.2, 0.3, 0.4)]
    assert _report(
        7,
        ok,
        "polar >= trellis in all %d cells%s; polar perfect at QF<=90%s; "
        "polar QF95 successes %s of 24"
        % (len(cells),
           "" if not dominated else " EXCEPT %s" % dominated,
           "" if not imperfect else " EXCEPT %s" % imperfect,
           spc95),
    )


def test_acceptance_8_reliability_recursion():
    """Reliability recursion: exact hand values at n = 4, alpha = 0.5,
    and exact mean preservation for random alphas up to n = 2^14."""
    z4 = bhattacharyya_profile(4, 0.5)
    exact = z4.tolist() == [0.9375, 0.5625, 0.4375, 0.0625]

    rng = np.random.default_rng(80)
    worst = 0.0
    for e in range(1, 15):
        alpha = float(rng.uniform(0.01, 0.99))
        z = bhattacharyya_profile(1 << e, alpha)
        worst = max(worst, abs(float(z.mean()) - alpha))
    mean_ok = worst <= 1e-12

    ok = exact and mean_ok
    assert _report(
        8,
        ok,
        "n=4 alpha=0.5 -> %s (exact=%s); mean drift over n<=2^14: %.1e"
        % (tuple(z4.tolist()), exact, worst),
    )


def _random_quantized(rng) -> QuantizedImage:
    nby, nbx = int(rng.integers(1, 7)), int(rng.integers(1, 7))
    h = max(8 * nby - int(rng.integers(0, 8)), 1)
    w = max(8 * nbx - int(rng.integers(0, 8)), 1)
    coef = np.zeros((8 * nby, 8 * nbx), dtype=np.int32)
    nfill = int(rng.integers(0, coef.size))
    pos = rng.choice(coef.size, nfill, replace=False)
    vals = rng.geometric(0.05, nfill) * rng.choice([-1, 1], nfill)
    coef.reshape(-1)[pos] = np.clip(vals, -1023, 1023)
    coef[0, 0] = int(rng.integers(-1023, 1024))
    return QuantizedImage(coef, QuantTable(rng.integers(1, 256, (8, 8))), h, w)


def test_acceptance_9_codec_fidelity(tmp_path):
    """100 random coefficient images survive write+parse bit-exactly,
    and the decoder agrees coefficient-for-coefficient with an
    independent reference decode of the 10-file fixture set."""
    from pathlib import Path

    rng = np.random.default_rng(90)
    identity = 0
    for _ in range(100):
        img = _random_quantized(rng)
        back = parse_jpeg(write_jpeg(img))
        identity += (
            np.array_equal(back.coef, img.coef)
            and np.array_equal(back.qtable.entries, img.qtable.entries)
            and (back.height, back.width) == (img.height, img.width)
        )

    fixtures = Path(__file__).parent / "fixtures"
    ref = np.load(fixtures / "reference_coefficients.npz")
    names = sorted({k.split("/")[0] for k in ref.files})
    agree = 0
    for name in names:
        img = read_jpeg_file(fixtures / (name + ".jpg"))
        agree += (
            np.array_equal(img.coef, ref[name + "/coef"])
            and np.array_equal(img.qtable.entries, ref[name + "/qtable"])
            and (img.height, img.width) == tuple(ref[name + "/size"])
        )

    ok = identity == 100 and agree == len(names) == 10
    assert _report(
        9,
        ok,
        "%d/100 write-parse identities, %d/%d reference decodes exact"
        % (identity, agree, len(names)),
    )
