"""Deterministic synthetic grayscale covers and the embed/verify sweep.

Real photographs cannot ship with the tests, so the corpus blends the
ingredients that matter to a JPEG embedder: smooth shading (sparse
low-frequency spectra), soft objects and hard edges (mid-band energy),
and band-limited texture plus grain (nonzero AC mass everywhere).  Every
image is a pure function of its index.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .codes import make_code
from .errorless import embed
from .errors import CapacityError
from .jpeg_model import PixelImage, QuantizedImage, compress, nzac_count, qtable_from_qf

CORPUS_SEED = 2718
# a few non-multiple-of-8 and non-square sizes keep the padded-block
# edge cases exercised; everything stays >= 128 on both axes
_SIZES = {20: (136, 128), 21: (131, 137), 22: (160, 144), 23: (128, 131)}


def synth_image(idx: int) -> PixelImage:
    """Pseudo-photographic test image, fully determined by idx."""
    h, w = _SIZES.get(idx, (128, 128))
    rng = np.random.default_rng(np.random.SeedSequence((CORPUS_SEED, idx)))
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    img = np.zeros((h, w))

    for _ in range(3):
        fy, fx = rng.uniform(0.3, 2.5, size=2) / 128.0
        phase = rng.uniform(0, 2 * np.pi)
        amp = rng.uniform(15.0, 45.0)
        img += amp * np.cos(2 * np.pi * (fx * xx + fy * yy) + phase)

    for _ in range(int(rng.integers(2, 5))):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        sy, sx = rng.uniform(8.0, 26.0, size=2)
        amp = rng.uniform(20.0, 60.0) * rng.choice([-1.0, 1.0])
        img += amp * np.exp(
            -((yy - cy) ** 2 / (2 * sy**2) + (xx - cx) ** 2 / (2 * sx**2))
        )

    for _ in range(int(rng.integers(1, 3))):
        theta = rng.uniform(0, np.pi)
        cy, cx = rng.uniform(0.3 * h, 0.7 * h), rng.uniform(0.3 * w, 0.7 * w)
        soft = rng.uniform(0.8, 4.0)
        amp = rng.uniform(15.0, 45.0)
        d = (xx - cx) * np.cos(theta) + (yy - cy) * np.sin(theta)
        img += amp * np.tanh(d / soft)

    tex = gaussian_filter(rng.normal(size=(h, w)), sigma=rng.uniform(1.2, 3.0))
    img += tex * (rng.uniform(3.0, 9.0) / tex.std())
    img += rng.normal(scale=rng.uniform(0.8, 2.2), size=(h, w))

    img = 128.0 + (img - img.mean()) * (rng.uniform(26.0, 44.0) / img.std())
    return PixelImage(np.clip(np.round(img), 0, 255).astype(np.uint8))


def corpus(count: int = 24) -> list:
    return [synth_image(i) for i in range(count)]


def make_cover(px: PixelImage, qf: int) -> QuantizedImage:
    return compress(px, qtable_from_qf(qf))


def success_table(
    qfs=(75, 85, 90, 95),
    rates=(0.1, 0.2, 0.3, 0.4),
    code_names=("spc", "stc"),
    images=None,
    seed: int = 0,
    progress=None,
) -> dict:
    """Embed a random payload at every (qf, rate, code, image) and record
    whether the embed completed and whether the message survived one
    recompression.  Returns {(qf, rate, code): row} with counts and the
    collected failure reasons."""
    if images is None:
        images = corpus()
    results = {}
    for qf in qfs:
        covers = [make_cover(px, qf) for px in images]
        for rate in rates:
            for ci, cname in enumerate(code_names):
                code = make_code(cname)
                row = {"total": len(covers), "embedded": 0, "verified": 0, "errors": []}
                for i, cover in enumerate(covers):
                    m = int(round(rate * nzac_count(cover)))
                    rng = np.random.default_rng(
                        np.random.SeedSequence(
                            (seed, 5, qf, int(round(rate * 10000)), ci, i)
                        )
                    )
                    msg = rng.integers(0, 2, size=m, dtype=np.uint8)
                    key = int(rng.integers(0, 2**31 - 1))
                    try:
                        stego, rep = embed(cover, msg, key, code)
                    except CapacityError as exc:
                        row["errors"].append("image %d: %s" % (i, exc))
                        continue
                    if not rep.success:
                        row["errors"].append(
                            "image %d: mode %s: %s" % (i, rep.failed_mode, rep.error)
                        )
                        continue
                    row["embedded"] += 1
                    if rep.verified:
                        row["verified"] += 1
                    else:
                        row["errors"].append("image %d: extraction mismatch" % i)
                results[(qf, rate, cname)] = row
                if progress is not None:
                    progress(qf, rate, cname, row)
    return results
