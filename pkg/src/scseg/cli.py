"""Command line entry point: ``scseg segment | eval | synth``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .core import DimensionMismatchError, InvalidConfigError
from .estimators import ALGORITHMS
from .evaluation import evaluate_corpus
from .io import ImageIOError, UnsupportedFormatError, load_image, load_mask, write_image, write_mask
from .synth import page_spec, generate

log = logging.getLogger("scseg")

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_DIMENSION = 5


def _segmenter(args):
    if args.algorithm == "lad":
        return ALGORITHMS["lad"](
            block_size=args.block_size, min_block_size=args.min_block_size,
            n_bases=args.bases, eps1=args.eps1, eps2=args.eps2, eps3=args.eps3,
            eps4=args.eps4, rho=args.rho, max_iter=args.iters,
            chroma_refine=not args.no_chroma, n_jobs=args.threads)
    if args.algorithm == "djvu":
        return ALGORITHMS["djvu"](block_size=args.block_size, min_block_size=args.min_block_size)
    return ALGORITHMS["spec"](color_threshold=args.color_threshold,
                              primitive_size=args.primitive_size)


def cmd_segment(args):
    seg = _segmenter(args).fit()
    image = load_image(args.input)
    mask = seg.segment(image)
    write_mask(mask, args.output)
    log.info("%s: %d of %d pixels foreground", args.output, int(mask.labels.sum()),
             mask.labels.size)
    return EXIT_OK


def cmd_eval(args):
    names = sorted(f[:-len("_gt.png")] for f in os.listdir(args.gt) if f.endswith("_gt.png"))
    if not names:
        raise ImageIOError(f"no *_gt.png files in {args.gt}")
    pairs = []
    for name in names:
        pred_path = os.path.join(args.pred, name + ".png")
        pairs.append((load_mask(pred_path), load_mask(os.path.join(args.gt, name + "_gt.png"))))
    report = evaluate_corpus(pairs, names)
    try:
        with open(args.report, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
    except OSError as exc:
        raise ImageIOError(f"cannot write {args.report}: {exc}") from exc
    fmt = lambda v: "undefined" if v is None else f"{v:.4f}"
    print(f"images={len(pairs)} precision={fmt(report.precision)} recall={fmt(report.recall)} "
          f"macro_precision={fmt(report.macro_precision)} macro_recall={fmt(report.macro_recall)}")
    return EXIT_OK


def cmd_synth(args):
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        raise ImageIOError(f"cannot create {args.out}: {exc}") from exc
    for i in range(args.count):
        spec = page_spec(i, seed=args.seed, width=args.width, height=args.height,
                         background_kind=args.background, foreground_kind=args.foreground,
                         fg_luma_offset=args.offset, fg_chroma_offset=args.chroma_offset,
                         fg_coverage=args.coverage)
        image, gt = generate(spec)
        name = f"page_{i:03d}"
        write_image(image, os.path.join(args.out, name + ".png"))
        write_mask(gt, os.path.join(args.out, name + "_gt.png"))
    print(f"wrote {args.count} pages to {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="scseg",
                                     description="Screen content foreground/background segmentation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment one PNG into a foreground mask")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS), default="lad")
    p.add_argument("--block-size", type=int, default=64)
    p.add_argument("--min-block-size", type=int, default=8)
    p.add_argument("--bases", type=int, default=10)
    p.add_argument("--eps1", type=float, default=10.0)
    p.add_argument("--eps2", type=float, default=10.0)
    p.add_argument("--eps3", type=float, default=3.0)
    p.add_argument("--eps4", type=float, default=0.5)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--no-chroma", action="store_true", help="skip chroma refinement")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--color-threshold", type=int, default=32, help="spec: color count threshold")
    p.add_argument("--primitive-size", type=int, default=50, help="spec: primitive size threshold")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="precision/recall of predicted masks against ground truth")
    p.add_argument("--pred", required=True, help="directory of <name>.png masks")
    p.add_argument("--gt", required=True, help="directory of <name>_gt.png masks")
    p.add_argument("--report", required=True, help="JSON report path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write synthetic pages with ground truth")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coverage", type=float, default=0.1)
    p.add_argument("--offset", type=int, default=60)
    p.add_argument("--chroma-offset", type=int, default=0)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--background", choices=["dct_random", "flat", "two_region"],
                   default="dct_random")
    p.add_argument("--foreground", choices=["rect_text_strokes", "lines"],
                   default="rect_text_strokes")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InvalidConfigError, ValueError) as exc:
        if isinstance(exc, (UnsupportedFormatError, DimensionMismatchError)):
            code = EXIT_FORMAT if isinstance(exc, UnsupportedFormatError) else EXIT_DIMENSION
        else:
            code = EXIT_BAD_ARGS
        print(f"scseg: error: {exc}", file=sys.stderr)
        return code
    except ImageIOError as exc:
        print(f"scseg: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
