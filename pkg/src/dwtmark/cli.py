"""Command-line front end: embed, extract, attack, and a bench harness.

The bench command embeds once, runs the attack catalog against the
watermarked image, extracts with each requested detector and writes a
JSON report (plus a CSV when a JPEG quality sweep is requested).
Reports are deterministic for a given (inputs, flags, seed).
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import metrics
from .attacks import DEFAULT_BENCH, AttackSpecError, apply_attack, parse_spec
from .pixmap import (FormatError, quantize, read_image, read_watermark,
                     write_image, write_watermark)
from .watermarker import (EmbedConfig, embed_image, extract_image,
                          parse_detector)

REPORT_VERSION = 1
SEED_ENV = "DWTMARK_SEED"


def _round6(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf"
    return round(float(x), 6)


def _config_from_args(args):
    return EmbedConfig(alpha=args.alpha, q=(args.q1, args.q2, args.q3),
                       levels=args.levels, modulation=args.modulation)


def _add_config_flags(p):
    p.add_argument("--alpha", type=float, default=0.4,
                   help="watermark strength in (0,1)")
    p.add_argument("--q1", type=float, default=0.06)
    p.add_argument("--q2", type=float, default=0.04)
    p.add_argument("--q3", type=float, default=0.02)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--modulation", choices=("negative", "positive"),
                   default="negative")


def _default_seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SystemExit(f"bad {SEED_ENV} value: {env!r}")
    return 0


def cmd_embed(args):
    cover = read_image(args.cover)
    wm = read_watermark(args.watermark)
    cfg = _config_from_args(args)
    marked, report = embed_image(cover, wm, cfg)
    write_image(marked, args.out)
    print(f"psnr_db={_round6(report.psnr)} "
          f"modified_coefficients={report.total_modified}", file=sys.stderr)
    return 0


def cmd_extract(args):
    cover = read_image(args.cover)
    received = read_image(args.received)
    cfg = _config_from_args(args)
    detector = parse_detector(args.detector)
    est = extract_image(cover, received, cfg, detector)
    write_watermark(est, args.out)
    if args.truth:
        truth = read_watermark(args.truth)
        print(f"ber={_round6(metrics.ber(truth, est))} "
              f"ncc={_round6(metrics.ncc(truth, est))}")
    return 0


def cmd_attack(args):
    img = read_image(args.input)
    spec = parse_spec(args.spec)
    out = apply_attack(img, spec, default_seed=_default_seed(args))
    write_image(out, args.out)
    return 0


def _bench_rows(args):
    if args.attacks == "all":
        return list(DEFAULT_BENCH)
    return [s.strip() for s in args.attacks.split(";") if s.strip()]


def cmd_bench(args):
    cover = read_image(args.cover)
    wm = read_watermark(args.watermark)
    cfg = _config_from_args(args)
    seed = _default_seed(args)
    detectors = {}
    for name in args.detectors.split(","):
        name = name.strip()
        detectors[name] = parse_detector(name)

    marked, embed_report = embed_image(cover, wm, cfg)
    transmitted = quantize(marked)

    report = {
        "format_version": REPORT_VERSION,
        "config": {
            "cover": args.cover,
            "watermark": args.watermark,
            "alpha": cfg.alpha,
            "q": list(cfg.q),
            "levels": cfg.levels,
            "modulation": cfg.modulation,
            "seed": seed,
            "detectors": sorted(detectors),
            "repeat": args.repeat,
        },
        "transparency": {
            "psnr_db": _round6(embed_report.psnr),
            "ssim": _round6(metrics.ssim(cover, marked)),
            "kl_security": _round6(metrics.kl_security(cover, marked)),
            "mutual_information": _round6(metrics.mutual_information(cover, marked)),
            "modified_coefficients": embed_report.total_modified,
        },
        "attacks": [],
    }

    for spec_text in _bench_rows(args):
        row = {"spec": spec_text, "seed": seed}
        try:
            spec = parse_spec(spec_text)
            runs = {name: {"ber": [], "ncc": []} for name in detectors}
            for rep_i in range(args.repeat):
                attacked = apply_attack(transmitted, spec,
                                        default_seed=seed + rep_i)
                for name, structure in detectors.items():
                    est = extract_image(cover, attacked, cfg, structure)
                    runs[name]["ber"].append(metrics.ber(wm, est))
                    runs[name]["ncc"].append(metrics.ncc(wm, est))
            row["detectors"] = {}
            for name, vals in sorted(runs.items()):
                entry = {"ber": _round6(float(np.mean(vals["ber"]))),
                         "ncc": _round6(float(np.mean(vals["ncc"])))}
                if args.repeat > 1:
                    entry["ber_std"] = _round6(float(np.std(vals["ber"])))
                row["detectors"][name] = entry
        except (AttackSpecError, ValueError) as e:
            row["error"] = str(e)
        report["attacks"].append(row)

    sweep_rows = []
    if args.jpeg_sweep:
        lo, _, hi = args.jpeg_sweep.partition("..")
        try:
            qualities = range(int(lo), int(hi) + 1, args.jpeg_sweep_step)
        except ValueError:
            raise SystemExit(f"bad sweep range: {args.jpeg_sweep!r}")
        for quality in qualities:
            attacked = apply_attack(transmitted, parse_spec(f"jpeg:q={quality}"),
                                    default_seed=seed)
            for name, structure in sorted(detectors.items()):
                est = extract_image(cover, attacked, cfg, structure)
                sweep_rows.append((quality, name,
                                   _round6(metrics.ber(wm, est)),
                                   _round6(metrics.ncc(wm, est))))

    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if sweep_rows:
        sweep_path = args.sweep_out or (os.path.splitext(args.out)[0] + "_sweep.csv")
        with open(sweep_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["quality", "detector", "ber", "ncc"])
            writer.writerows(sweep_rows)
    print(f"report written to {args.out}", file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dwtmark",
        description="Wavelet-domain image watermarking: embed, extract, "
                    "attack simulation and robustness benchmarking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a 16x16 mark into a PGM image")
    p.add_argument("cover")
    p.add_argument("watermark")
    p.add_argument("out")
    _add_config_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the mark from a received image")
    p.add_argument("cover")
    p.add_argument("received")
    p.add_argument("out")
    p.add_argument("--detector", default="I",
                   help="I, II, or a subband list like h2,v2,v3")
    p.add_argument("--truth", help="reference mark (PBM) for BER/NCC")
    _add_config_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="apply one attack to an image")
    p.add_argument("input")
    p.add_argument("out")
    p.add_argument("spec", help="e.g. jpeg:q=50 or awgn:snr_db=11.4,seed=7")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="run the full attack/detector matrix")
    p.add_argument("cover")
    p.add_argument("watermark")
    p.add_argument("--attacks", default="all",
                   help="'all' or ';'-separated attack specs")
    p.add_argument("--detectors", default="I,II")
    p.add_argument("--jpeg-sweep", default=None, metavar="LO..HI",
                   help="also sweep JPEG quality, e.g. 10..90")
    p.add_argument("--jpeg-sweep-step", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--repeat", type=int, default=1,
                   help="trials per seeded attack (mean/std reported)")
    p.add_argument("--out", default="report.json")
    p.add_argument("--sweep-out", default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, AttackSpecError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
