"""
Windowed depth matching of a target (lower pad) against a reference (upper pad).

Both images are reduced to 1D, the reference is cut into consecutive windows, each window is
aligned against a target span that floats within a margin, the window paths are stitched into
one composite path, and the composite path yields the depth-shift curve and the warped target.
Windows run in reference order: each target span is centred on where the previous window
ended.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .descriptors import DescriptorConfig, FeatureMatrix, default_descriptor, feature_matrix
from .exceptions import ConfigError, DataError, InvariantViolation
from .signals import BoreholeImage, GroundTruthWarp, Signal, reduce_image
from .utils import relative_close, round_half_up
from .warping import (
    AlignmentResult,
    WarpPath,
    align,
    apply_band,
    open_end_dtw,
    shape_distance_matrix,
)

log = logging.getLogger(__name__)

WINDOW_FT_RANGE = (10.0, 30.0)
MIN_WINDOW_SAMPLES = 8


@dataclass(frozen=True)
class MatchConfig:
    window_ft: float = 20.0
    margin_frac: float = 0.1
    descriptor: DescriptorConfig = field(default_factory=default_descriptor)
    # None: derived from the reference sample interval
    samples_per_ft: Optional[float] = None
    band_halfwidth: Optional[int] = None

    def __post_init__(self) -> None:
        lo, hi = WINDOW_FT_RANGE
        if not lo <= self.window_ft <= hi:
            raise ConfigError(f"window_ft must be within {lo:g}-{hi:g} ft (got {self.window_ft})")
        if not 0.0 <= self.margin_frac <= 0.5:
            raise ConfigError(f"margin_frac must be within [0, 0.5] (got {self.margin_frac})")
        if self.samples_per_ft is not None:
            if not self.samples_per_ft > 0:
                raise ConfigError(f"samples_per_ft must be > 0 (got {self.samples_per_ft})")
            if self.window_ft * self.samples_per_ft < MIN_WINDOW_SAMPLES:
                raise ConfigError(
                    f"window of {self.window_ft:g} ft at {self.samples_per_ft:g} samples/ft is "
                    f"shorter than {MIN_WINDOW_SAMPLES} samples"
                )
        if self.band_halfwidth is not None and self.band_halfwidth < 1:
            raise ConfigError(f"band half-width must be >= 1 sample (got {self.band_halfwidth})")

    def window_samples(self) -> int:
        if self.samples_per_ft is None:
            raise ConfigError("samples_per_ft is not set; call resolved() with the sample interval")
        return round_half_up(self.window_ft * self.samples_per_ft)

    def margin_samples(self, window_length: int) -> int:
        return round_half_up(self.margin_frac * window_length)

    def resolved(self, sample_interval: float) -> MatchConfig:
        """Fills samples_per_ft from the data when it is not configured."""
        from_data = 1.0 / sample_interval
        if self.samples_per_ft is None:
            return replace(self, samples_per_ft=from_data)
        if not relative_close(self.samples_per_ft, from_data, rtol=1e-6):
            log.warning(
                "Configured %.6g samples/ft differs from the data (%.6g samples/ft); "
                "windows follow the configured rate",
                self.samples_per_ft,
                from_data,
            )
        return self


@dataclass(frozen=True, eq=False)
class DepthShiftCurve:
    depths: np.ndarray
    shift_samples: np.ndarray
    shift_ft: np.ndarray

    def __post_init__(self) -> None:
        sizes = {self.depths.shape, self.shift_samples.shape, self.shift_ft.shape}
        if len(sizes) != 1 or self.depths.ndim != 1:
            raise InvariantViolation("depth-shift curve columns differ in length")

    def __len__(self) -> int:
        return int(self.depths.shape[0])

    @property
    def median_shift(self) -> float:
        return float(np.median(self.shift_samples))

    def summary(self) -> Dict[str, Any]:
        shifts = self.shift_samples
        return {
            "samples": len(self),
            "median_shift_samples": self.median_shift,
            "mean_abs_shift_samples": float(np.mean(np.abs(shifts))),
            "max_abs_shift_samples": float(np.max(np.abs(shifts))),
            "median_shift_ft": float(np.median(self.shift_ft)),
        }


@dataclass(frozen=True, eq=False)
class CompositePath(WarpPath):
    """Stitched path over the whole reference; every reference index appears at least once."""

    repairs: int = 0

    def _validate(self) -> None:
        super()._validate()
        m = self.shape[0]
        i = self.ref_indices
        if i[0] != 0 or i[-1] != m - 1:
            raise InvariantViolation(f"composite path spans reference {i[0]}..{i[-1]}, expected 0..{m - 1}")


@dataclass(frozen=True)
class WindowRecord:
    ref_start: int
    ref_end: int
    target_start: int
    target_end: int
    distance: float


@dataclass(frozen=True, eq=False)
class SignalMatch:
    path: CompositePath
    curve: DepthShiftCurve
    windows: Tuple[WindowRecord, ...]
    config: MatchConfig


@dataclass(frozen=True, eq=False)
class MatchResult:
    aligned: BoreholeImage
    curve: DepthShiftCurve
    path: CompositePath
    reference: BoreholeImage
    target: BoreholeImage
    reference_signal: Signal
    target_signal: Signal
    windows: Tuple[WindowRecord, ...]
    config: MatchConfig


def partition_windows(m: int, cfg: MatchConfig) -> List[Tuple[int, int]]:
    """
    Consecutive inclusive (start, end) reference windows. A remainder shorter than half a
    window joins the last window, otherwise it forms its own window.
    """
    if m < 1:
        raise DataError("cannot partition an empty reference")
    w = cfg.window_samples()
    full, rest = divmod(m, w)
    if full == 0:
        return [(0, m - 1)]
    windows = [(k * w, k * w + w - 1) for k in range(full)]
    if rest:
        if 2 * rest < w:
            windows[-1] = (windows[-1][0], m - 1)
        else:
            windows.append((full * w, m - 1))
    return windows


def _target_span(m: int, n_target: int, target_center: float, margin: int) -> Tuple[int, int]:
    first = round_half_up(target_center - (m - 1) / 2.0)
    lo = max(first - margin, 0)
    hi = min(first + m - 1 + margin, n_target - 1)
    if hi < lo:
        raise DataError("target exhausted")
    return lo, hi


def match_window(
    ref_seg: Signal,
    target: Signal,
    target_center: float,
    cfg: MatchConfig,
    *,
    ref_features: Optional[FeatureMatrix] = None,
    target_features: Optional[FeatureMatrix] = None,
) -> AlignmentResult:
    """
    Aligns one reference window against the target span of the same length plus a margin on
    each side, centred on ``target_center`` (the expected target index of the window centre).
    Target indices of the returned path are global. ``ref_features`` are the rows for
    ``ref_seg``; ``target_features`` the rows for the whole ``target``.
    """
    m = len(ref_seg)
    margin = cfg.margin_samples(m)
    lo, hi = _target_span(m, len(target), target_center, margin)
    target_seg = target.segment(lo, hi + 1)

    fx = ref_features if ref_features is not None else feature_matrix(ref_seg, cfg.descriptor)
    if target_features is not None:
        fy = target_features.take(lo, hi + 1)
    else:
        fy = feature_matrix(target_seg, cfg.descriptor)
    d = shape_distance_matrix(fx, fy)
    if cfg.band_halfwidth is not None:
        first = round_half_up(target_center - (m - 1) / 2.0)
        d = apply_band(d, cfg.band_halfwidth, offset=first - lo)

    if margin == 0:
        local = align(d, keep_accumulated=False)
    else:
        local = open_end_dtw(ref_seg, target_seg, d, keep_accumulated=False)
    return local.with_target_offset(lo, len(target))


def stitch(
    results: Sequence[AlignmentResult],
    *,
    margin: Optional[int] = None,
) -> CompositePath:
    """
    Concatenates consecutive window paths (reference indices local to each window, target
    indices global). A window that starts behind the previous window's last target index is
    clamped up to it; one that starts ahead is bridged with horizontal steps.
    """
    if not results:
        raise DataError("nothing to stitch")
    chunks: List[np.ndarray] = []
    ref_offset = 0
    repairs = 0
    n_target = max(r.path.shape[1] for r in results)

    for k, result in enumerate(results):
        pairs = result.path.pairs.copy()
        pairs[:, 0] += ref_offset
        if chunks:
            prev_i, prev_j = (int(v) for v in chunks[-1][-1])
            first_j = int(pairs[0, 1])
            jump = first_j - prev_j
            if margin is not None and abs(jump) > margin:
                log.warning(
                    "Window %d starts %d target samples from where window %d ended (margin %d)",
                    k, jump, k - 1, margin,
                )
            if jump < 0:
                pairs[:, 1] = np.maximum(pairs[:, 1], prev_j)
                repairs += 1
            elif jump > 1:
                bridge = np.column_stack([np.full(jump - 1, prev_i), np.arange(prev_j + 1, first_j)])
                chunks.append(bridge)
                repairs += 1
        chunks.append(pairs)
        ref_offset += result.path.shape[0]

    pairs = np.concatenate(chunks)
    keep = np.ones(len(pairs), dtype=bool)
    keep[1:] = (np.diff(pairs, axis=0) != 0).any(axis=1)
    return CompositePath(
        pairs[keep],
        shape=(ref_offset, n_target),
        closed_start=False,
        closed_end=False,
        repairs=repairs,
    )


def _registration_offset(reference: Signal, target: Signal) -> float:
    """Target index (fractional) sitting at the depth of reference index 0."""
    return (reference.depth_start - target.depth_start) / reference.sample_interval


def shift_curve(
    path: WarpPath,
    ref: Signal,
    *,
    target: Optional[Signal] = None,
) -> DepthShiftCurve:
    """
    shift_samples[i] = mean of the target indices matched to i, minus i. When ``target`` is
    given and starts at a different depth, the shift is measured in depth rather than index.
    """
    m = len(ref)
    if path.shape[0] != m:
        raise DataError(f"path spans {path.shape[0]} reference samples, signal has {m}")
    i = path.ref_indices
    counts = np.bincount(i, minlength=m)
    if (counts == 0).any():
        raise InvariantViolation("path skips reference samples")
    sums = np.bincount(i, weights=path.target_indices.astype(float), minlength=m)
    shifts = sums / counts - np.arange(m)
    if target is not None:
        offset = _registration_offset(ref, target)
        if offset != 0:
            shifts = shifts - offset
    return DepthShiftCurve(
        depths=ref.depths,
        shift_samples=shifts,
        shift_ft=shifts * ref.sample_interval,
    )


def apply_warp(target_image: BoreholeImage, path: WarpPath, ref: Signal) -> BoreholeImage:
    """Row i of the output is the mean of the target rows matched to reference index i."""
    m = len(ref)
    if path.shape[0] != m:
        raise DataError(f"path spans {path.shape[0]} reference samples, signal has {m}")
    i, j = path.ref_indices, path.target_indices
    if j.max() >= target_image.n_depth:
        raise DataError(f"path reaches target row {j.max()}, image has {target_image.n_depth}")
    counts = np.bincount(i, minlength=m)
    if (counts == 0).any():
        raise InvariantViolation("path skips reference samples")
    sums = np.zeros((m, target_image.n_azimuth))
    np.add.at(sums, i, target_image.pixels[j])
    return BoreholeImage(
        sums / counts[:, None],
        depth_start=ref.depth_start,
        sample_interval=ref.sample_interval,
    )


def match_signals(reference: Signal, target: Signal, cfg: MatchConfig) -> SignalMatch:
    """The windowed workflow on two 1D signals."""
    if not relative_close(reference.sample_interval, target.sample_interval):
        raise DataError(
            f"sample interval mismatch: {reference.sample_interval:g} vs {target.sample_interval:g}"
        )
    if reference.depth_end < target.depth_start or target.depth_end < reference.depth_start:
        raise DataError("disjoint intervals")
    cfg = cfg.resolved(reference.sample_interval)

    windows = partition_windows(len(reference), cfg)
    ref_features = feature_matrix(reference, cfg.descriptor)
    target_features = feature_matrix(target, cfg.descriptor)
    offset = _registration_offset(reference, target)

    results: List[AlignmentResult] = []
    records: List[WindowRecord] = []
    last_j: Optional[int] = None
    for start, end in windows:
        length = end - start + 1
        if last_j is None:
            center = offset + (start + end) / 2.0
        else:
            center = last_j + 1 + (length - 1) / 2.0
        result = match_window(
            reference.segment(start, end + 1),
            target,
            center,
            cfg,
            ref_features=ref_features.take(start, end + 1),
            target_features=target_features,
        )
        j = result.path.target_indices
        last_j = int(j[-1])
        records.append(WindowRecord(start, end, int(j[0]), last_j, result.distance))
        results.append(result)
        log.debug("Window %d..%d -> target %d..%d cost %.6g", start, end, j[0], last_j, result.distance)

    margin = cfg.margin_samples(cfg.window_samples())
    composite = stitch(results, margin=margin)
    curve = shift_curve(composite, reference, target=target)
    log.info(
        "Matched %d window(s); median shift %.3f samples (%d join repair(s))",
        len(records),
        curve.median_shift,
        composite.repairs,
    )
    return SignalMatch(path=composite, curve=curve, windows=tuple(records), config=cfg)


def match_depth(
    ref_image: BoreholeImage,
    target_image: BoreholeImage,
    cfg: MatchConfig,
) -> MatchResult:
    """Reduce both images, match the 1D signals window by window, and warp the target image."""
    reference = reduce_image(ref_image)
    target = reduce_image(target_image)
    matched = match_signals(reference, target, cfg)
    aligned = apply_warp(target_image, matched.path, reference)
    return MatchResult(
        aligned=aligned,
        curve=matched.curve,
        path=matched.path,
        reference=ref_image,
        target=target_image,
        reference_signal=reference,
        target_signal=target,
        windows=matched.windows,
        config=matched.config,
    )


def curve_error(curve: DepthShiftCurve, truth: GroundTruthWarp, *, interior: float = 0.9) -> float:
    """Mean absolute error (samples) against the known warp over the central ``interior`` fraction."""
    if len(truth) != len(curve):
        raise DataError(f"truth has {len(truth)} samples, curve has {len(curve)}")
    trim = round_half_up(len(curve) * (1.0 - interior) / 2.0)
    err = np.abs(curve.shift_samples - truth.shift_samples)
    return float(np.mean(err[trim:len(err) - trim]))
