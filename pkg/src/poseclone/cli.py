"""Command-line entry point: ``poseclone <command> ...``.

Exit status: 0 on success, 2 for invalid input, 3 for I/O failures.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
from fractions import Fraction

import numpy as np

from . import io
from .metrics import DEFAULT_GAMMA, LossComponents, LossWeights, aggregate_losses, coverage_report
from .normalize import SkeletonSequence, align_sequence
from .pose import (DEFAULT_MIN_CONFIDENCE, NUM_JOINTS, DescriptorSequence, default_sigma,
                   extract_skeleton, render_pose)
from .temporal import DEFAULT_SIGMA_ALPHA, limb_weight_map, mse, reenact_split, tc_loss

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3


class InvalidInput(Exception):
    pass


def _dump(obj) -> str:
    # repr-based float formatting round-trips float64
    return json.dumps(obj, allow_nan=False)


def cmd_render(args):
    seq = io.read_skeletons(args.skeletons)
    sigma = args.sigma or default_sigma(seq.frame_height, seq.frame_width)
    volumes = np.stack([render_pose(s, seq.frame_height, seq.frame_width, sigma) for s in seq])
    io.write_pose_sequence(args.out, volumes)
    print(len(seq))


def cmd_extract(args):
    volumes = io.read_pose_sequence(args.poses)
    t, j, h, w = volumes.shape
    if j != NUM_JOINTS:
        raise InvalidInput(f"expected {NUM_JOINTS} joint channels, got {j}")
    if t == 0:
        raise InvalidInput("pose sequence has no frames")
    skeletons = tuple(extract_skeleton(v, args.min_confidence) for v in volumes)
    io.write_skeletons(args.out, SkeletonSequence(skeletons, h, w))
    print(t)


def cmd_normalize(args):
    seq = io.read_skeletons(args.skeletons)
    aligned, tf = align_sequence(seq, args.target_hip_width, args.center)
    io.write_skeletons(args.out, aligned)
    print(_dump(tf.to_dict()))


def cmd_coverage(args):
    driving = DescriptorSequence.from_skeletons(io.read_skeletons(args.driving))
    reference = DescriptorSequence.from_skeletons(io.read_skeletons(args.reference))
    report = coverage_report(driving, reference, args.gamma, args.threads)
    if args.csv:
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["frame", "limb", "distance", "nn_frame", "flagged"])
        for frame, limb, dist, nn, flagged in report.rows():
            writer.writerow([frame, limb, "" if dist is None else repr(dist),
                             "" if nn is None else nn, int(flagged)])
        with io.atomic_write(args.csv, "w") as f:
            f.write(buf.getvalue())
    summary = report.summary
    if args.json:
        doc = {"summary": summary,
               "frame_distance": [None if np.isnan(d) else float(d) for d in report.frame_distance]}
        with io.atomic_write(args.json, "w") as f:
            f.write(_dump(doc))
    print(_dump(summary))


def cmd_tc_loss(args):
    frames = io.read_frame_dir(args.frames)
    flows = io.read_flow_dir(args.flows)
    seq = io.read_skeletons(args.skeletons)
    if len(frames) < 2:
        raise InvalidInput("need at least two frames")
    if len(flows) != len(frames) - 1:
        raise InvalidInput(f"{len(frames)} frames need {len(frames) - 1} flows, got {len(flows)}")
    if len(seq) != len(frames):
        raise InvalidInput(f"{len(frames)} frames but {len(seq)} skeletons")
    h, w = frames[0].shape[:2]
    sigma = args.sigma_alpha or default_sigma(h, w, DEFAULT_SIGMA_ALPHA)
    values = []
    for i, flow in enumerate(flows):
        if args.forward_flow:
            flow = -flow.astype(np.float64)
        alpha = limb_weight_map(seq.frames[i + 1], height=h, width=w, sigma_alpha=sigma)
        values.append(tc_loss(frames[i], frames[i + 1], flow, alpha, args.normalize))
    print(_dump({"pairs": values, "mean": float(np.mean(values))}))


def cmd_mse(args):
    a = io.read_frame_dir(args.frames_a)
    b = io.read_frame_dir(args.frames_b)
    if not a or not b:
        raise InvalidInput("frame directories must not be empty")
    print(_dump({"frames": len(a), "mse": mse(a, b)}))


def cmd_split(args):
    length = args.length
    if length is None:
        length = len(io.list_files(args.frames_dir, ".ppm"))
    print(_dump(reenact_split(length, args.fraction).to_dict()))


def cmd_losses(args):
    w = LossWeights(args.lambda_vgg, args.lambda_s, args.lambda_tc)
    c = LossComponents(args.gan_p, args.vgg, args.gan_s, args.tc)
    print(_dump(aggregate_losses(c, w)))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poseclone", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("render", help="render skeleton JSON into a PSQ1 confidence-map file")
    s.add_argument("skeletons")
    s.add_argument("--sigma", type=float, default=None,
                   help="Gaussian width in pixels (default 6 px per 256 px of frame size)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("extract", help="recover skeleton JSON from a PSQ1 file (argmax per channel)")
    s.add_argument("poses")
    s.add_argument("--min-confidence", type=float, default=DEFAULT_MIN_CONFIDENCE)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("normalize", help="align a skeleton sequence (one scale, one translation)")
    s.add_argument("skeletons")
    s.add_argument("--target-hip-width", type=float, required=True)
    s.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"), default=None,
                   help="target mean center (default: frame center)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("coverage", help="match driving poses against a reference repertoire")
    s.add_argument("driving")
    s.add_argument("reference")
    s.add_argument("--gamma", type=float, default=DEFAULT_GAMMA,
                   help="per-limb flag threshold, in descriptor units (accepts inf)")
    s.add_argument("--csv", default=None, help="per frame x limb rows")
    s.add_argument("--json", default=None, help="summary and per-frame distances")
    s.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $POSECLONE_THREADS, 0 = auto)")
    s.set_defaults(func=cmd_coverage)

    s = sub.add_parser(
        "tc-loss", help="temporal coherence loss over consecutive frame pairs",
        description="Flows are backward: flow i maps pixels of frame i+1 into frame i, "
                    "so frame i is sampled at p + flow(p). Use --forward-flow to negate "
                    "forward flows (a first-order approximation).")
    s.add_argument("frames", help="directory of PPM frames")
    s.add_argument("flows", help="directory of .flo files, one per consecutive pair")
    s.add_argument("skeletons", help="skeleton JSON with one skeleton per frame")
    s.add_argument("--sigma-alpha", type=float, default=None,
                   help="weight falloff in pixels (default 10 px per 256 px of frame size)")
    s.add_argument("--forward-flow", action="store_true")
    s.add_argument("--normalize", choices=("pixels", "alpha", "sum"), default="pixels")
    s.set_defaults(func=cmd_tc_loss)

    s = sub.add_parser("mse", help="RGB mean squared error between two PPM sequences")
    s.add_argument("frames_a")
    s.add_argument("frames_b")
    s.set_defaults(func=cmd_mse)

    s = sub.add_parser("split", help="self-reenactment train/test split")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--length", type=int)
    g.add_argument("--frames-dir")
    s.add_argument("--fraction", type=Fraction, default=Fraction(2, 3),
                   help="train fraction, e.g. 2/3 or 0.5")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("losses", help="combine loss terms with the training weights")
    for name in ("gan-p", "vgg", "gan-s", "tc"):
        s.add_argument(f"--{name}", type=float, default=0.0)
    s.add_argument("--lambda-vgg", type=float, default=10.0)
    s.add_argument("--lambda-s", type=float, default=0.1)
    s.add_argument("--lambda-tc", type=float, default=10.0)
    s.set_defaults(func=cmd_losses)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (OSError, FileNotFoundError) as e:
        print(f"poseclone: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (InvalidInput, ValueError, ZeroDivisionError) as e:
        print(f"poseclone: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
