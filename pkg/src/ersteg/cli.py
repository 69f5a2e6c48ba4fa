"""Command line front end.

Exit codes are the error taxonomy: 0 success, 1 unexpected failure,
2 usage, 3 file I/O, 4 malformed or unsupported JPEG, 5 payload does not
fit, 6 embedding ran but produced no valid stego.  The embedding key is
never defaulted silently: pass --seed or set ERSTEG_SEED.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import traceback

import numpy as np

from . import __version__
from .codes import make_code
from .corpus import success_table
from .errorless import channel_stats, embed, extract
from .errors import EmbeddingError, ErstegError, UsageError
from .jpeg_file import read_jpeg_file, write_jpeg_file
from .jpeg_model import nzac_count, recompress
from .wet_analysis import lm_curve_polar, lm_curve_stc, pw_heatmap, zero_cell_count


def _bits_sha256(bits: np.ndarray) -> str:
    return hashlib.sha256(np.packbits(bits).tobytes()).hexdigest()


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ERSTEG_SEED")
    if env is None:
        raise UsageError("no embedding key: pass --seed or set ERSTEG_SEED")
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError("ERSTEG_SEED must be an integer") from exc


def _make_code(args):
    return make_code(args.code, list_size=args.list_size, height=args.height)


def _load_message(args, img) -> np.ndarray:
    given = (args.message is not None) + (args.random_bits is not None) + (
        args.rate is not None
    )
    if given != 1:
        raise UsageError("exactly one of --message, --random-bits, --rate")
    if args.message is not None:
        try:
            with open(args.message, "rb") as f:
                payload = f.read()
        except OSError as exc:
            raise UsageError("cannot read message file: %s" % exc) from exc
        bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
        if args.bits is not None:
            if args.bits > bits.size:
                raise UsageError(
                    "--bits %d exceeds the %d bits in the file" % (args.bits, bits.size)
                )
            bits = bits[: args.bits]
        return bits
    rng = np.random.default_rng(args.msg_seed)
    if args.random_bits is not None:
        n = args.random_bits
    else:
        n = int(round(args.rate * nzac_count(img)))
    if n < 0:
        raise UsageError("message length must be nonnegative")
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def cmd_embed(args) -> int:
    seed = _resolve_seed(args)
    cover = read_jpeg_file(args.input)
    msg = _load_message(args, cover)
    code = _make_code(args)
    stego, rep = embed(cover, msg, seed, code, verify=not args.no_verify)
    report = {
        "success": rep.success,
        "verified": rep.verified,
        "code": rep.code,
        "m_total": rep.m_total,
        "nzac": rep.nzac,
        "rate": rep.rate,
        "message_sha256": _bits_sha256(msg),
        "error": rep.error,
        "failed_mode": rep.failed_mode,
        "lattices": [
            {
                "mode": list(l.mode),
                "n_coded": l.n_coded,
                "m": l.m,
                "wet_coded": l.wet_coded,
                "flips": l.flips,
            }
            for l in rep.lattices
        ],
    }
    if args.report:
        with open(args.report, "w") as f:
            json.dump(report, f, indent=1)
    if not rep.success:
        raise EmbeddingError(
            "embedding failed at mode %s: %s" % (rep.failed_mode, rep.error)
        )
    if rep.verified is False:
        raise EmbeddingError("stego failed its own recompression check")
    write_jpeg_file(args.output, stego)
    flips = sum(l.flips for l in rep.lattices)
    print(
        "embedded %d bits (%.3f bpnzac) with %s, %d coefficient changes"
        % (rep.m_total, rep.rate, rep.code, flips)
    )
    return 0


def cmd_extract(args) -> int:
    seed = _resolve_seed(args)
    img = read_jpeg_file(args.input)
    if args.simulate_channel:
        img = recompress(img)
    bits = extract(img, args.bits, seed, _make_code(args))
    packed = np.packbits(bits).tobytes()
    if args.output:
        try:
            with open(args.output, "wb") as f:
                f.write(packed)
        except OSError as exc:
            raise UsageError("cannot write %s: %s" % (args.output, exc)) from exc
    print("extracted %d bits, sha256 %s" % (bits.size, _bits_sha256(bits)))
    return 0


def cmd_verify(args) -> int:
    seed = _resolve_seed(args)
    stego = read_jpeg_file(args.input)
    try:
        with open(args.message, "rb") as f:
            payload = f.read()
    except OSError as exc:
        raise UsageError("cannot read message file: %s" % exc) from exc
    msg = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    if args.bits is not None:
        msg = msg[: args.bits]
    got = extract(recompress(stego), msg.size, seed, _make_code(args))
    if np.array_equal(got, msg):
        print("PASS: message survives recompression (%d bits)" % msg.size)
        return 0
    diff = int((got != msg).sum())
    raise EmbeddingError("FAIL: %d of %d bits differ after recompression"
                         % (diff, msg.size))


def cmd_channel_stats(args) -> int:
    img = read_jpeg_file(args.input)
    st = channel_stats(img)
    if args.json:
        with open(args.json, "w") as f:
            json.dump(st, f, indent=1)
    print(
        "blocks %d  nzac %d  dry %d/%d (wet ratio %.4f)"
        % (st["blocks"], st["nzac"], st["total_dry"], 64 * st["blocks"],
           st["wet_ratio"])
    )
    worst = sorted(st["modes"], key=lambda m: -m["wet_ratio"])[:5]
    for m in worst:
        print(
            "  mode (%d,%d): dry %d/%d wet ratio %.4f"
            % (m["mode"][0], m["mode"][1], m["dry"], m["n"], m["wet_ratio"])
        )
    return 0


def cmd_lm_curves(args) -> int:
    n = args.n
    ms = np.arange(1, n + 1)
    lp = lm_curve_polar(n, ms)
    ls = lm_curve_stc(n, ms, args.height)
    if args.csv:
        with open(args.csv, "w") as f:
            f.write("m,alpha,lm_polar,lm_stc\n")
            for m, a, b in zip(ms, lp, ls):
                f.write("%d,%.8f,%d,%d\n" % (m, m / n, a, b))
    ge = ms[lp >= ls]
    runs = []
    if ge.size:
        start = prev = int(ge[0])
        for m in ge[1:]:
            if m == prev + 1:
                prev = int(m)
                continue
            runs.append((start, prev))
            start = prev = int(m)
        runs.append((start, prev))
    print("n=%d h=%d: wet tolerance of the polar construction >= trellis on:" %
          (n, args.height))
    for a, b in runs:
        print("  m in [%d, %d]  (alpha in [%.6f, %.6f])" % (a, b, a / n, b / n))
    return 0


def cmd_pw_heatmap(args) -> int:
    code = _make_code(args)
    pw = pw_heatmap(
        code,
        args.profile,
        n=args.n,
        grid=args.grid,
        trials=args.trials,
        seed=_resolve_seed(args),
    )
    if args.csv:
        with open(args.csv, "w") as f:
            f.write("wet_idx,payload_idx,wet_ratio,payload_ratio,p_w\n")
            g = args.grid
            for i in range(g):
                for j in range(g):
                    f.write(
                        "%d,%d,%.6f,%.6f,%.6f\n"
                        % (i, j, (i + 0.5) / g, (j + 0.5) / g, pw[i, j])
                    )
    print(
        "%s / %s profile: %d of %d cells never fail, mean failure rate %.4f"
        % (code.name, args.profile, zero_cell_count(pw), pw.size, pw.mean())
    )
    return 0


def cmd_success_table(args) -> int:
    qfs = tuple(int(x) for x in args.qfs.split(","))
    rates = tuple(float(x) for x in args.rates.split(","))
    codes = tuple(args.codes.split(","))

    def progress(qf, rate, cname, row):
        print(
            "qf%-3d rate %.2f %-3s: embedded %d/%d verified %d"
            % (qf, rate, cname, row["embedded"], row["total"], row["verified"]),
            flush=True,
        )

    res = success_table(
        qfs=qfs,
        rates=rates,
        code_names=codes,
        seed=_resolve_seed(args),
        progress=progress if not args.quiet else None,
    )
    if args.csv:
        with open(args.csv, "w") as f:
            f.write("qf,rate,code,total,embedded,verified\n")
            for (qf, rate, cname), row in sorted(res.items()):
                f.write(
                    "%d,%.3f,%s,%d,%d,%d\n"
                    % (qf, rate, cname, row["total"], row["embedded"],
                       row["verified"])
                )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ersteg",
        description="JPEG-domain embedding that survives one recompression",
    )
    p.add_argument("--version", action="version", version="ersteg " + __version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_key(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="embedding key (or set ERSTEG_SEED)")

    def add_code(sp):
        sp.add_argument("--code", choices=("spc", "stc"), default="spc")
        sp.add_argument("--list-size", type=int, default=6,
                        help="survivor list width of the polar search")
        sp.add_argument("--height", type=int, default=10,
                        help="trellis constraint height")

    sp = sub.add_parser("embed", help="embed a message into a cover JPEG")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--output", "-o", required=True)
    sp.add_argument("--message", "-m", help="file whose bits are the payload")
    sp.add_argument("--bits", type=int, default=None,
                    help="use only the first N bits of the message file")
    sp.add_argument("--random-bits", type=int, default=None,
                    help="embed N pseudo-random bits instead of a file")
    sp.add_argument("--rate", type=float, default=None,
                    help="pseudo-random payload sized as rate * nzAC")
    sp.add_argument("--msg-seed", type=int, default=0,
                    help="generator seed for --random-bits / --rate")
    sp.add_argument("--report", help="write a JSON embedding report here")
    sp.add_argument("--no-verify", action="store_true",
                    help="skip the internal recompression check")
    add_key(sp)
    add_code(sp)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("extract", help="read a message back out")
    sp.add_argument("--input", "-i", required=True,
                    help="the channel output (recompressed stego)")
    sp.add_argument("--bits", "-n", type=int, required=True)
    sp.add_argument("--output", "-o", help="write packed bits here")
    sp.add_argument("--simulate-channel", action="store_true",
                    help="recompress the input first (input is raw stego)")
    add_key(sp)
    add_code(sp)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("verify", help="check a stego file against its message")
    sp.add_argument("--input", "-i", required=True, help="the stego JPEG")
    sp.add_argument("--message", "-m", required=True)
    sp.add_argument("--bits", type=int, default=None)
    add_key(sp)
    add_code(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("channel-stats", help="per-mode robustness of an image")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--json", help="write the full per-mode table here")
    sp.set_defaults(func=cmd_channel_stats)

    sp = sub.add_parser("lm-curves", help="wet-tolerance curves of both codes")
    sp.add_argument("--n", type=int, default=4096)
    sp.add_argument("--height", type=int, default=10)
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_lm_curves)

    sp = sub.add_parser("pw-heatmap",
                        help="failure probability over (wet ratio, payload)")
    sp.add_argument("--profile", choices=("constant", "square"),
                    default="constant")
    sp.add_argument("--n", type=int, default=4096)
    sp.add_argument("--grid", type=int, default=20)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--csv")
    add_key(sp)
    add_code(sp)
    sp.set_defaults(func=cmd_pw_heatmap)

    sp = sub.add_parser("success-table",
                        help="embed/verify sweep over the synthetic corpus")
    sp.add_argument("--qfs", default="75,85,90,95")
    sp.add_argument("--rates", default="0.1,0.2,0.3,0.4")
    sp.add_argument("--codes", default="spc,stc")
    sp.add_argument("--csv")
    sp.add_argument("--quiet", action="store_true")
    add_key(sp)
    sp.set_defaults(func=cmd_success_table)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except ErstegError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return exc.exit_code
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
