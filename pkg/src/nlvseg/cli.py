"""Command line entry point: ``segment``, ``eval`` and ``synth`` subcommands."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

from . import io
from .flow import resolve_flows
from .metrics import frame_iou
from .params import ConfigError, PipelineParams, load_config
from .pipeline import segment_video
from .synth import moving_square_sequence

log = logging.getLogger("nlvseg")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
ENERGY_COLUMNS = ["iter", "E_unary", "E_spatial", "E_temporal", "E_total", "labels_changed"]
METRICS_COLUMNS = ["frame", "pixel_error", "iou"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 8 or h < 8:
        raise argparse.ArgumentTypeError("frames must be at least 8x8")
    return w, h


def _frame_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated frame numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nlvseg", description="Unsupervised video object segmentation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    seg = sub.add_parser("segment", help="segment the moving object in a frame directory")
    seg.add_argument("--frames", required=True, type=Path)
    seg.add_argument("--flows", type=Path, help="directory of precomputed .flo files, one per frame pair")
    seg.add_argument("--config", type=Path)
    seg.add_argument("--out", required=True, type=Path)
    seg.add_argument("--dump-debug", action="store_true",
                     help="also write boundary probability, inside-outside and superpixel label maps")
    seg.add_argument("--seed", type=int)

    ev = sub.add_parser("eval", help="score predicted masks against ground truth")
    ev.add_argument("--pred", required=True, type=Path)
    ev.add_argument("--gt", required=True, type=Path)
    ev.add_argument("--gt-frames", type=_frame_list, help="frame numbers to evaluate, e.g. 1,11,21")
    ev.add_argument("--out", required=True, type=Path)

    syn = sub.add_parser("synth", help="write the synthetic moving-square sequence with ground truth")
    syn.add_argument("--out", required=True, type=Path)
    syn.add_argument("--frames", type=int, default=10)
    syn.add_argument("--size", type=_size, default=(64, 64))
    syn.add_argument("--speed", type=float, default=2.0)
    syn.add_argument("--seed", type=int, default=0)
    return parser


def run_segment(args) -> int:
    params = load_config(args.config) if args.config else PipelineParams()
    if args.seed is not None:
        params = params.replace(random_seed=args.seed)
    frames = io.load_frame_sequence(args.frames)
    start = time.perf_counter()
    flows = resolve_flows(frames, args.flows, params.flow)
    result = segment_video(frames, flows, params)
    log.info("segmented %d frames in %.1f s", len(frames), time.perf_counter() - start)

    args.out.mkdir(parents=True, exist_ok=True)
    for t, mask in enumerate(result.masks, start=1):
        io.write_mask(mask, args.out / f"{t:04d}.png")
    with open(args.out / "energy.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ENERGY_COLUMNS)
        for r in result.trace:
            writer.writerow([r.iteration, f"{r.unary:.6f}", f"{r.spatial:.6f}", f"{r.temporal:.6f}",
                             f"{r.total:.6f}", r.labels_changed])
    if args.dump_debug:
        debug = args.out / "debug"
        debug.mkdir(exist_ok=True)
        for t in range(len(frames)):
            io.write_gray(result.boundary_maps[t], debug / f"boundary_{t + 1:04d}.png")
            io.write_mask(result.inside_maps[t], debug / f"inside_{t + 1:04d}.png")
            io.write_gray16(result.label_maps[t], debug / f"superpixels_{t + 1:04d}.png")
    return EXIT_OK


def run_eval(args) -> int:
    pred = io.load_mask_sequence(args.pred)
    gt = io.load_mask_sequence(args.gt)
    numbers = args.gt_frames if args.gt_frames else sorted(gt)
    if not numbers:
        raise io.DataError(f"no ground-truth masks in {args.gt}")
    rows = []
    for n in numbers:
        if n not in gt:
            raise io.DataError(f"no ground truth for frame {n}")
        if n not in pred:
            raise io.DataError(f"no predicted mask for frame {n}")
        a, b = pred[n], gt[n]
        if a.shape != b.shape:
            raise io.DataError(f"frame {n}: predicted mask {a.shape} vs ground truth {b.shape}")
        rows.append((n, int((a.astype(bool) ^ b.astype(bool)).sum()), frame_iou(a, b)))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_COLUMNS)
        for n, err, score in rows:
            writer.writerow([n, err, f"{score:.6f}"])
        mean_err = sum(r[1] for r in rows) / len(rows)
        mean_iou = sum(r[2] for r in rows) / len(rows)
        writer.writerow(["mean", f"{mean_err:.6f}", f"{mean_iou:.6f}"])
    print(f"mean pixel error {mean_err:.2f}, mean IoU {mean_iou:.4f} over {len(rows)} frames")
    return EXIT_OK


def run_synth(args) -> int:
    if args.frames < 2:
        raise UsageError("--frames must be >= 2")
    frames, masks = moving_square_sequence(args.frames, args.size, args.speed, seed=args.seed)
    (args.out / "frames").mkdir(parents=True, exist_ok=True)
    (args.out / "gt").mkdir(parents=True, exist_ok=True)
    for t, (frame, mask) in enumerate(zip(frames, masks), start=1):
        io.write_frame(frame, args.out / "frames" / f"{t:04d}.png")
        io.write_mask(mask, args.out / "gt" / f"{t:04d}.png")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"segment": run_segment, "eval": run_eval, "synth": run_synth}
    try:
        return handlers[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"nlvseg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.DataError, OSError) as exc:
        print(f"nlvseg: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
