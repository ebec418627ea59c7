"""
Signals, borehole images and the image-to-signal reduction.

Both containers are frozen dataclasses over read-only float64 arrays, so they can be shared
between threads freely. Depth registration is ``depth_start`` (ft) plus a positive
``sample_interval`` (ft/sample).
"""
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np

from .exceptions import DataError, InvariantViolation, NullRowError

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

log = logging.getLogger(__name__)

DEFAULT_NULL_VALUE = -999.25


def _readonly(values: Any, *, ndim: int, what: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise DataError(f"{what} is not a rectangular numeric array: {e}") from e
    if arr.ndim != ndim:
        raise DataError(f"{what} must be {ndim}-dimensional (got shape {arr.shape})")
    arr.setflags(write=False)
    return arr


def _check_registration(depth_start: float, sample_interval: float) -> None:
    if not np.isfinite(depth_start):
        raise DataError(f"depth_start must be finite (got {depth_start})")
    if not (np.isfinite(sample_interval) and sample_interval > 0):
        raise DataError(f"sample_interval must be > 0 (got {sample_interval})")


@dataclass(frozen=True, eq=False)
class Signal:
    values: np.ndarray
    depth_start: float = 0.0
    sample_interval: float = 1.0

    def __post_init__(self) -> None:
        values = _readonly(self.values, ndim=1, what="signal")
        if values.size == 0:
            raise DataError("empty signal")
        if not np.all(np.isfinite(values)):
            raise DataError("signal contains non-finite samples")
        _check_registration(self.depth_start, self.sample_interval)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "depth_start", float(self.depth_start))
        object.__setattr__(self, "sample_interval", float(self.sample_interval))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def depths(self) -> np.ndarray:
        return self.depth_start + np.arange(len(self)) * self.sample_interval

    @property
    def depth_end(self) -> float:
        return self.depth_start + (len(self) - 1) * self.sample_interval

    def segment(self, start: int, stop: int) -> Self:
        """Samples ``start..stop-1`` with the depth registration carried along."""
        if not 0 <= start < stop <= len(self):
            raise DataError(f"segment [{start}, {stop}) outside signal of length {len(self)}")
        return type(self)(
            self.values[start:stop],
            depth_start=self.depth_start + start * self.sample_interval,
            sample_interval=self.sample_interval,
        )


@dataclass(frozen=True, eq=False)
class BoreholeImage:
    """Rows are depth samples, columns are azimuthal sensors."""

    pixels: np.ndarray
    depth_start: float = 0.0
    sample_interval: float = 1.0

    def __post_init__(self) -> None:
        pixels = _readonly(self.pixels, ndim=2, what="image")
        if pixels.size == 0:
            raise DataError("empty image")
        if not np.all(np.isfinite(pixels)):
            raise DataError("image contains non-finite pixels")
        _check_registration(self.depth_start, self.sample_interval)
        object.__setattr__(self, "pixels", pixels)
        object.__setattr__(self, "depth_start", float(self.depth_start))
        object.__setattr__(self, "sample_interval", float(self.sample_interval))

    @property
    def n_depth(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def n_azimuth(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def depths(self) -> np.ndarray:
        return self.depth_start + np.arange(self.n_depth) * self.sample_interval

    @property
    def depth_end(self) -> float:
        return self.depth_start + (self.n_depth - 1) * self.sample_interval


@dataclass(frozen=True, eq=False)
class GroundTruthWarp:
    """
    Known warp of a synthetic pair: reference sample i appears at target position
    i + shift_samples[i] (positive = target deeper).
    """

    shift_samples: np.ndarray

    def __post_init__(self) -> None:
        shifts = _readonly(self.shift_samples, ndim=1, what="ground-truth warp")
        mapped = np.arange(shifts.size) + shifts
        if np.any(np.diff(mapped) < -1e-9):
            raise InvariantViolation("ground-truth warp is not monotone")
        object.__setattr__(self, "shift_samples", shifts)

    def __len__(self) -> int:
        return int(self.shift_samples.shape[0])


def reduce_image(image: BoreholeImage) -> Signal:
    """Averages each depth row across the azimuthal sensors."""
    if image.pixels.size == 0:
        raise DataError("empty image")
    return Signal(
        image.pixels.mean(axis=1),
        depth_start=image.depth_start,
        sample_interval=image.sample_interval,
    )


def repair_null_pixels(
    pixels: np.ndarray,
    null_value: float = DEFAULT_NULL_VALUE,
) -> Tuple[np.ndarray, int]:
    """
    Replaces null pixels (the sentinel, NaN or +/-Inf) by the mean of the finite pixels of the
    same row. Returns the repaired copy and the number of pixels replaced.
    Raises NullRowError for a row with no usable pixel.
    """
    out = np.array(pixels, dtype=float)
    missing = ~np.isfinite(out) | (out == null_value)
    n_missing = int(missing.sum())
    if n_missing == 0:
        return out, 0

    usable = ~missing
    counts = usable.sum(axis=1)
    empty_rows = np.flatnonzero(counts == 0)
    if empty_rows.size:
        raise NullRowError(int(empty_rows[0]))

    sums = np.where(usable, out, 0.0).sum(axis=1)
    row_means = sums / counts
    rows, _ = np.nonzero(missing)
    out[missing] = row_means[rows]
    log.debug("Repaired %d null pixel(s) in %d row(s)", n_missing, np.unique(rows).size)
    return out, n_missing
