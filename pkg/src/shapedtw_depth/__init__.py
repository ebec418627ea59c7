from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from .config import RunConfig
from .depth_match import (
    DepthShiftCurve,
    MatchConfig,
    MatchResult,
    SignalMatch,
    apply_warp,
    curve_error,
    match_depth,
    match_signals,
    match_window,
    shift_curve,
    stitch,
)
from .descriptors import DescriptorConfig, FeatureMatrix, Subsequence, default_descriptor, feature_matrix
from .exceptions import (
    ConfigError,
    DataError,
    DepthMatchError,
    IngestError,
    InvariantViolation,
    OutputError,
    UsageError,
)
from .fileio import read_image, read_signal, write_outputs
from .signals import BoreholeImage, GroundTruthWarp, Signal, reduce_image
from .synthetic import WarpSpec, generate_synthetic_image_pair, generate_synthetic_pair
from .warping import AlignmentResult, CostMatrix, WarpPath, dtw, open_end_dtw, shape_dtw


def match_files(
    ref_path: Union[str, Path],
    target_path: Union[str, Path],
    config: Optional[RunConfig] = None,
) -> MatchResult:
    """
    Reads two image files and depth-matches the target to the reference:
      1) config, if given
      2) the default run configuration (HOG-1D(60, 10, 2) + raw, 20 ft windows)
    """
    cfg = (config or RunConfig()).match_config()
    return match_depth(read_image(ref_path), read_image(target_path), cfg)


__all__ = [
    "AlignmentResult",
    "BoreholeImage",
    "ConfigError",
    "CostMatrix",
    "DataError",
    "DepthMatchError",
    "DepthShiftCurve",
    "DescriptorConfig",
    "FeatureMatrix",
    "GroundTruthWarp",
    "IngestError",
    "InvariantViolation",
    "MatchConfig",
    "MatchResult",
    "OutputError",
    "RunConfig",
    "Signal",
    "SignalMatch",
    "Subsequence",
    "UsageError",
    "WarpPath",
    "WarpSpec",
    "apply_warp",
    "curve_error",
    "default_descriptor",
    "dtw",
    "feature_matrix",
    "generate_synthetic_image_pair",
    "generate_synthetic_pair",
    "match_depth",
    "match_files",
    "match_signals",
    "match_window",
    "open_end_dtw",
    "read_image",
    "read_signal",
    "reduce_image",
    "shape_dtw",
    "shift_curve",
    "stitch",
    "write_outputs",
]
