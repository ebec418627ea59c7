from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, get_args

from .config import RunConfig
from .depth_match import match_depth
from .descriptors import feature_matrix
from .exceptions import DepthMatchError
from .fileio import (
    read_image,
    write_feature_matrix,
    write_image,
    write_outputs,
    write_path,
    write_signal,
    write_truth,
)
from .signals import Signal, reduce_image
from .synthetic import WarpSpec, generate_synthetic_image_pair, generate_synthetic_pair
from .types import DescriptorName, SynthKind, TextureKind
from .utils import ensure_dir, format_value
from .warping import apply_band, dtw, open_end_dtw, pointwise_distance_matrix, shape_distance_matrix, shape_dtw

log = logging.getLogger("shapedtw_depth")

EXIT_INTERNAL = 4

# flag dest -> RunConfig key
_DESCRIPTOR_FLAGS = ("descriptor", "radius", "cell_size", "num_bins", "block_size", "gradient_scale", "hog_weight", "raw_weight")
_MATCH_FLAGS = ("window_ft", "margin_frac", "samples_per_ft", "band")


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return p


def _descriptor_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("descriptor")
    g.add_argument("--descriptor", choices=get_args(DescriptorName), default=None, help="default: hog1d+raw")
    g.add_argument("--radius", type=int, default=None, help="subsequence half-length (default: 2 * cell size)")
    g.add_argument("--cell-size", type=int, default=None, help="HOG-1D cell size (default: 60)")
    g.add_argument("--num-bins", type=int, default=None, help="HOG-1D orientation bins (default: 10)")
    g.add_argument("--block-size", type=int, default=None, help="HOG-1D cells per block (default: 2)")
    g.add_argument("--gradient-scale", type=float, default=None, help="HOG-1D gradient scaling (default: 1)")
    g.add_argument("--hog-weight", type=float, default=None, help="compound weight of HOG-1D (default: 1)")
    g.add_argument("--raw-weight", type=float, default=None, help="compound weight of raw (default: 1)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    desc = _descriptor_parser()

    ap = argparse.ArgumentParser(
        prog="shapedtw-depth",
        description="ShapeDTW alignment and depth matching of dual-pad borehole images.",
    )
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    m = sub.add_parser("match", parents=[common, desc], help="depth-match a target image to a reference image")
    m.add_argument("--ref", required=True, type=Path, help="reference (upper pad) image CSV")
    m.add_argument("--target", required=True, type=Path, help="target (lower pad) image CSV")
    m.add_argument("--out", required=True, type=Path, help="output directory")
    m.add_argument("--config", type=Path, default=None, help="JSON run configuration; flags override it")
    m.add_argument("--window-ft", type=float, default=None, help="window length in ft, 10-30 (default: 20)")
    m.add_argument("--margin-frac", type=float, default=None, help="target margin per side (default: 0.1)")
    m.add_argument("--samples-per-ft", type=float, default=None, help="default: 1 / header sample_interval")
    m.add_argument("--band", type=int, default=None, help="band half-width in samples (default: none)")
    m.set_defaults(func=cmd_match)

    d = sub.add_parser("dtw", parents=[common, desc], help="align two 1D signals")
    d.add_argument("--x", required=True, type=Path, help="reference signal or image CSV")
    d.add_argument("--y", required=True, type=Path, help="target signal or image CSV")
    d.add_argument("--shape", action="store_true", help="ShapeDTW over descriptors instead of plain DTW")
    d.add_argument("--open-end", action="store_true", help="free start and end on the target axis")
    d.add_argument("--band", type=int, default=None, help="band half-width in samples (with --open-end the band follows j = i)")
    d.add_argument("--out", type=Path, default=None, help="write the warp path CSV here")
    d.set_defaults(func=cmd_dtw)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic pair with a known warp")
    s.add_argument("--kind", choices=get_args(SynthKind), default="image")
    s.add_argument("--length", type=int, required=True, help="samples (depth rows)")
    s.add_argument("--warp", type=WarpSpec.parse, default=WarpSpec.constant(0.0), help="constant:K | ramp:A:B | piecewise:K0,K1,...")
    s.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma on both pads")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--texture", choices=get_args(TextureKind), default="sinusoid-mix", help="signal texture")
    s.add_argument("--azimuth", type=int, default=32, help="image columns")
    s.add_argument("--dips", type=int, default=6, help="sinusoidal dip events in the image")
    s.add_argument("--depth-start", type=float, default=0.0)
    s.add_argument("--sample-interval", type=float, default=0.1)
    s.add_argument("--out", required=True, type=Path, help="output directory")
    s.set_defaults(func=cmd_synth)

    f = sub.add_parser("features", parents=[common, desc], help="dump the feature matrix of a signal or image")
    f.add_argument("--input", required=True, type=Path)
    f.add_argument("--out", required=True, type=Path, help="output CSV")
    f.set_defaults(func=cmd_features)

    return ap


def _run_config(args: argparse.Namespace, keys: Sequence[str]) -> RunConfig:
    config_path = getattr(args, "config", None)
    base = RunConfig.load(config_path) if config_path is not None else RunConfig()
    overrides: Dict[str, Any] = {k: getattr(args, k, None) for k in keys}
    return base.merged(overrides)


def _load_signal(path: Path) -> Signal:
    return reduce_image(read_image(path))


def cmd_match(args: argparse.Namespace) -> int:
    run_cfg = _run_config(args, _DESCRIPTOR_FLAGS + _MATCH_FLAGS)
    cfg = run_cfg.match_config()
    ref = read_image(args.ref)
    target = read_image(args.target)
    log.info("Matching %s (%d x %d) to %s (%d x %d) with %s",
             args.target, target.n_depth, target.n_azimuth,
             args.ref, ref.n_depth, ref.n_azimuth, cfg.descriptor.describe())
    result = match_depth(ref, target, cfg)
    write_outputs(result, args.out, run_config=run_cfg.to_dict())
    return 0


def cmd_dtw(args: argparse.Namespace) -> int:
    x = _load_signal(args.x)
    y = _load_signal(args.y)
    descriptor = _run_config(args, _DESCRIPTOR_FLAGS).descriptor_config() if args.shape else None

    if args.open_end:
        if descriptor is not None:
            dist = shape_distance_matrix(feature_matrix(x, descriptor), feature_matrix(y, descriptor))
        else:
            dist = pointwise_distance_matrix(x, y)
        if args.band is not None:
            dist = apply_band(dist, args.band, offset=0)
        result = open_end_dtw(x, y, dist, keep_accumulated=False)
    elif descriptor is not None:
        result = shape_dtw(x, y, descriptor, band=args.band, keep_accumulated=False)
    else:
        result = dtw(x, y, band=args.band, keep_accumulated=False)

    print(f"distance {format_value(result.distance)}")
    if args.out is not None:
        write_path(args.out, result.path, x)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    out = ensure_dir(args.out)
    registration = dict(depth_start=args.depth_start, sample_interval=args.sample_interval)
    if args.kind == "signal":
        ref, target, truth = generate_synthetic_pair(
            args.length, args.texture, args.warp, args.noise, args.seed, **registration
        )
        write_signal(out / "reference.csv", ref)
        write_signal(out / "target.csv", target)
        write_truth(out / "truth.csv", truth, ref)
    else:
        ref_img, target_img, truth = generate_synthetic_image_pair(
            args.length, args.azimuth, args.warp, args.dips, args.seed, noise_sigma=args.noise, **registration
        )
        write_image(out / "reference.csv", ref_img)
        write_image(out / "target.csv", target_img)
        write_truth(out / "truth.csv", truth, reduce_image(ref_img))
    log.info("Synthetic %s pair (%d samples, %s warp, seed %d) in %s",
             args.kind, args.length, args.warp.kind, args.seed, out)
    return 0


def cmd_features(args: argparse.Namespace) -> int:
    descriptor = _run_config(args, _DESCRIPTOR_FLAGS).descriptor_config()
    signal = _load_signal(args.input)
    features = feature_matrix(signal, descriptor)
    write_feature_matrix(args.out, features, signal, descriptor=descriptor.describe())
    log.info("%d x %d feature matrix (%s)", len(features), features.feature_dim, descriptor.describe())
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
    )

    try:
        return int(args.func(args))
    except DepthMatchError as e:
        log.error("%s", e)
        return e.exit_code
    except Exception:
        log.exception("Internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
