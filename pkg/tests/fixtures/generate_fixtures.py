"""Regenerate the JPEG parser reference fixtures.

Writes ten deterministic grayscale JPEGs through Pillow (varied quality,
optimized and standard Huffman tables, sizes that do and do not divide
by 8), then records each file's quantized coefficients as libjpeg itself
reports them (jpeg_read_coefficients, no IDCT involved) into
reference_coefficients.npz.

libjpeg stores both coefficient blocks and quantization tables in
natural row-major order; probe_order() re-verifies that on every run by
encoding a quality-50 file, whose luminance table must equal the Annex-K
base table entry for entry.

Run from the repository root:  python3 tests/fixtures/generate_fixtures.py
Requires Pillow, gcc, and libjpeg development headers.
"""

import pathlib
import subprocess
import sys

import numpy as np
from PIL import Image

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent.parent / "src"))

from ersteg.jpeg_model import BASE_LUMA_QT  # noqa: E402

DUMPER_SRC = HERE / "dump_coefficients.c"
DUMPER_BIN = pathlib.Path("/tmp/dump_coefficients_fixture")

# (name, height, width, quality, optimize)
CASES = [
    ("c00_q60", 128, 128, 60, False),
    ("c01_q75_opt", 128, 128, 75, True),
    ("c02_q80_odd", 131, 137, 80, False),
    ("c03_q85", 96, 112, 85, False),
    ("c04_q90_opt", 64, 64, 90, True),
    ("c05_q92", 144, 120, 92, False),
    ("c06_q95", 128, 128, 95, False),
    ("c07_q97_opt", 120, 97, 97, True),
    ("c08_q70_ramp", 64, 256, 70, False),
    ("c09_q88_check", 77, 83, 88, False),
]


def pixels(idx: int, h: int, w: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence((4242, idx)))
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    img = np.zeros((h, w))
    if idx == 8:
        img += 200.0 * xx / max(w - 1, 1)  # horizontal ramp
    elif idx == 9:
        img += 60.0 * (((yy // 8) + (xx // 8)) % 2)  # blocky checker
    for _ in range(3):
        fy, fx = rng.uniform(0.3, 3.0, size=2) / 128.0
        img += rng.uniform(10, 40) * np.cos(
            2 * np.pi * (fx * xx + fy * yy) + rng.uniform(0, 2 * np.pi)
        )
    for _ in range(3):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        s = rng.uniform(6, 20)
        img += rng.uniform(-50, 50) * np.exp(
            -((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * s * s)
        )
    img += rng.normal(scale=2.0, size=(h, w))
    img = 128.0 + (img - img.mean()) * (35.0 / img.std())
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


def build_dumper():
    subprocess.run(
        ["gcc", "-O2", "-o", str(DUMPER_BIN), str(DUMPER_SRC), "-ljpeg"],
        check=True,
    )


def dump(path: pathlib.Path):
    out = subprocess.run(
        [str(DUMPER_BIN), str(path)], capture_output=True, text=True, check=True
    ).stdout
    lines = out.splitlines()
    ncomp = int(lines[0].split()[1])
    assert ncomp == 1, path
    h, w = map(int, lines[1].split()[1:])
    hdr = lines[2].split()
    nby, nbx = int(hdr[3]), int(hdr[4])
    q = np.array([int(x) for x in hdr[hdr.index("qtable") + 1 :]], dtype=np.int64)
    rows = lines[3 : 3 + nby * nbx]
    blocks = np.array([[int(x) for x in ln.split()] for ln in rows], dtype=np.int32)
    coef = blocks.reshape(nby, nbx, 8, 8).transpose(0, 2, 1, 3)
    return coef.reshape(8 * nby, 8 * nbx), q.reshape(8, 8), h, w


def probe_order():
    probe = HERE / "_probe_q50.jpg"
    Image.fromarray(pixels(0, 64, 64), mode="L").save(probe, quality=50)
    _, q, _, _ = dump(probe)
    probe.unlink()
    if not np.array_equal(q.reshape(64), BASE_LUMA_QT.reshape(64)):
        raise AssertionError(
            "libjpeg quantval no longer matches natural order; fixture "
            "assembly must be revisited"
        )


def main():
    build_dumper()
    probe_order()
    arrays = {}
    for idx, (name, h, w, quality, optimize) in enumerate(CASES):
        path = HERE / (name + ".jpg")
        Image.fromarray(pixels(idx, h, w), mode="L").save(
            path, quality=quality, optimize=optimize
        )
        coef, q, dh, dw = dump(path)
        assert (dh, dw) == (h, w), name
        arrays[name + "/coef"] = coef
        arrays[name + "/qtable"] = q
        arrays[name + "/size"] = np.array([h, w], dtype=np.int64)
        nz = int((coef != 0).sum())
        print("%s: %dx%d quality %d nonzero %d" % (name, h, w, quality, nz))
    np.savez_compressed(HERE / "reference_coefficients.npz", **arrays)
    print("wrote", HERE / "reference_coefficients.npz")


if __name__ == "__main__":
    main()
