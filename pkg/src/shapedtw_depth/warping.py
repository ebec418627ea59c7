"""
Dynamic-programming alignment with the symmetric three-step pattern.

    C(i, j) = D(i, j) + min(C(i-1, j), C(i, j-1), C(i-1, j-1))

Traceback prefers diagonal, then vertical (i-1, j), then horizontal (i, j-1) on ties.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .descriptors import DescriptorConfig, FeatureMatrix, feature_matrix
from .exceptions import DataError, InvariantViolation
from .signals import Signal
from .types import CostKind
from .utils import exact_sum, longest_run, relative_close

log = logging.getLogger(__name__)

_STEPS = {(1, 0), (0, 1), (1, 1)}


@dataclass(frozen=True, eq=False)
class CostMatrix:
    entries: np.ndarray
    kind: CostKind

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.size == 0:
            raise InvariantViolation(f"cost matrix must be a non-empty 2D array (got {entries.shape})")
        if np.isnan(entries).any():
            raise InvariantViolation("cost matrix contains NaN")
        if self.kind != "accumulated" and (entries < 0).any():
            raise InvariantViolation("distance matrix contains negative entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> Tuple[int, int]:
        m, n = self.entries.shape
        return int(m), int(n)


@dataclass(frozen=True, eq=False)
class WarpPath:
    """
    Ordered (reference index, target index) pairs. ``shape`` is (m, n), the extents of the
    two index axes the pairs live in.
    """

    pairs: np.ndarray
    shape: Tuple[int, int]
    closed_start: bool = True
    closed_end: bool = True

    def __post_init__(self) -> None:
        pairs = np.array(self.pairs, dtype=np.int64).reshape(-1, 2)
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "shape", (int(self.shape[0]), int(self.shape[1])))
        self._validate()

    def _validate(self) -> None:
        m, n = self.shape
        pairs = self.pairs
        if pairs.shape[0] == 0:
            raise InvariantViolation("warp path is empty")
        if (pairs[:, 0] < 0).any() or (pairs[:, 0] >= m).any():
            raise InvariantViolation(f"reference index outside [0, {m})")
        if (pairs[:, 1] < 0).any() or (pairs[:, 1] >= n).any():
            raise InvariantViolation(f"target index outside [0, {n})")
        steps = np.diff(pairs, axis=0)
        ok = np.isin(steps, (0, 1)).all(axis=1) & (steps.sum(axis=1) >= 1)
        if not ok.all():
            k = int(np.flatnonzero(~ok)[0])
            raise InvariantViolation(
                f"illegal step {tuple(pairs[k])} -> {tuple(pairs[k + 1])} at position {k}"
            )
        if self.closed_start and tuple(pairs[0]) != (0, 0):
            raise InvariantViolation(f"closed path must start at (0, 0), starts at {tuple(pairs[0])}")
        if self.closed_end and tuple(pairs[-1]) != (m - 1, n - 1):
            raise InvariantViolation(
                f"closed path must end at ({m - 1}, {n - 1}), ends at {tuple(pairs[-1])}"
            )

    def __len__(self) -> int:
        return int(self.pairs.shape[0])

    @property
    def ref_indices(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def target_indices(self) -> np.ndarray:
        return self.pairs[:, 1]

    def as_tuples(self) -> List[Tuple[int, int]]:
        return [(int(i), int(j)) for i, j in self.pairs]

    def is_diagonal(self) -> bool:
        return bool((np.diff(self.pairs, axis=0) == 1).all())

    def max_run_length(self) -> int:
        """Longest one-to-many run: consecutive pairs sharing a reference or a target index."""
        return max(longest_run(self.ref_indices), longest_run(self.target_indices))

    def cost(self, d: CostMatrix) -> float:
        return exact_sum(d.entries[self.ref_indices, self.target_indices].tolist())


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    distance: float
    path: WarpPath
    accumulated: Optional[CostMatrix] = None

    def __post_init__(self) -> None:
        if not self.distance >= 0:
            raise InvariantViolation(f"alignment distance must be >= 0 (got {self.distance})")

    def with_target_offset(self, offset: int, n_target: int) -> AlignmentResult:
        """Re-expresses target indices in a larger target of ``n_target`` samples."""
        pairs = self.path.pairs + np.array([0, offset])
        path = WarpPath(
            pairs,
            shape=(self.path.shape[0], n_target),
            closed_start=False,
            closed_end=False,
        )
        return replace(self, path=path, accumulated=None)


def pointwise_distance_matrix(x: Signal, y: Signal) -> CostMatrix:
    if len(x) == 0 or len(y) == 0:
        raise DataError("cannot align an empty signal")
    return CostMatrix(np.abs(x.values[:, None] - y.values[None, :]), kind="pointwise")


def shape_distance_matrix(fx: FeatureMatrix, fy: FeatureMatrix) -> CostMatrix:
    if fx.feature_dim != fy.feature_dim:
        raise DataError(f"feature dimension mismatch: {fx.feature_dim} != {fy.feature_dim}")
    if fx.feature_dim == 1:
        # single-coordinate features: exact absolute difference
        return CostMatrix(np.abs(fx.rows[:, :1] - fy.rows[:, 0][None, :]), kind="shape")
    return CostMatrix(cdist(fx.rows, fy.rows, metric="euclidean"), kind="shape")


def apply_band(d: CostMatrix, halfwidth: int, *, offset: Optional[float] = None) -> CostMatrix:
    """
    Sets entries farther than ``halfwidth`` samples from the band centre to +inf.
    The centre runs corner to corner, or along j = i + offset when ``offset`` is given, held
    inside the column range.
    """
    if halfwidth < 0:
        raise DataError(f"band half-width must be >= 0 (got {halfwidth})")
    m, n = d.shape
    i = np.arange(m, dtype=float)[:, None]
    if offset is None:
        centre = i * ((n - 1) / (m - 1)) if m > 1 else np.zeros_like(i)
    else:
        centre = np.clip(i + offset, 0, n - 1)
    j = np.arange(n, dtype=float)[None, :]
    outside = np.abs(j - centre) > halfwidth
    return CostMatrix(np.where(outside, np.inf, d.entries), kind=d.kind)


def accumulate(d: CostMatrix, *, open_start: bool = False) -> CostMatrix:
    """
    Accumulated cost. With ``open_start`` the whole first row is C(0, j) = D(0, j), i.e. the
    alignment may begin at any target index.
    """
    if d.kind == "accumulated":
        raise DataError("accumulate expects a pointwise or shape distance matrix")
    m, n = d.shape
    dist = d.entries.tolist()
    acc = [[0.0] * n for _ in range(m)]

    row, drow = acc[0], dist[0]
    if open_start:
        row[:] = drow
    else:
        row[0] = drow[0]
        for j in range(1, n):
            row[j] = drow[j] + row[j - 1]

    for i in range(1, m):
        prev, row, drow = acc[i - 1], acc[i], dist[i]
        row[0] = drow[0] + prev[0]
        for j in range(1, n):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = drow[j] + best

    return CostMatrix(np.array(acc), kind="accumulated")


def traceback(
    c: CostMatrix,
    *,
    end: Optional[int] = None,
    open_start: bool = False,
) -> WarpPath:
    """
    Walks back from (m-1, end) (default: the last column). A closed walk ends at (0, 0);
    with ``open_start`` it stops on the first reference row.
    """
    if c.kind != "accumulated":
        raise DataError("traceback expects an accumulated cost matrix")
    m, n = c.shape
    acc = c.entries.tolist()
    i, j = m - 1, (n - 1 if end is None else end)
    closed_end = j == n - 1
    pairs = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            if open_start:
                break
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag, up, left = acc[i - 1][j - 1], acc[i - 1][j], acc[i][j - 1]
            if diag <= up and diag <= left:
                i, j = i - 1, j - 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
        pairs.append((i, j))
    pairs.reverse()
    return WarpPath(
        np.array(pairs),
        shape=(m, n),
        closed_start=not open_start,
        closed_end=closed_end and not open_start,
    )


def _checked(d: CostMatrix, c: CostMatrix, path: WarpPath, distance: float, keep: bool) -> AlignmentResult:
    if not np.isfinite(distance):
        raise DataError("band too narrow: no admissible path")
    path_cost = path.cost(d)
    if not relative_close(path_cost, distance):
        raise InvariantViolation(f"path cost {path_cost!r} differs from accumulated cost {distance!r}")
    return AlignmentResult(distance=float(distance), path=path, accumulated=c if keep else None)


def align(d: CostMatrix, *, keep_accumulated: bool = True) -> AlignmentResult:
    """Closed-boundary alignment over a precomputed distance matrix."""
    c = accumulate(d)
    path = traceback(c)
    m, n = d.shape
    return _checked(d, c, path, c.entries[m - 1, n - 1], keep_accumulated)


def dtw(
    x: Signal,
    y: Signal,
    *,
    band: Optional[int] = None,
    keep_accumulated: bool = True,
) -> AlignmentResult:
    d = pointwise_distance_matrix(x, y)
    if band is not None:
        d = apply_band(d, band)
    return align(d, keep_accumulated=keep_accumulated)


def shape_dtw(
    x: Signal,
    y: Signal,
    cfg: DescriptorConfig,
    *,
    band: Optional[int] = None,
    keep_accumulated: bool = True,
) -> AlignmentResult:
    """DTW over the Euclidean distances between per-sample shape descriptors."""
    d = shape_distance_matrix(feature_matrix(x, cfg), feature_matrix(y, cfg))
    if band is not None:
        d = apply_band(d, band)
    return align(d, keep_accumulated=keep_accumulated)


def open_end_dtw(
    x: Signal,
    y: Signal,
    d: CostMatrix,
    *,
    keep_accumulated: bool = True,
) -> AlignmentResult:
    """
    Alignment that covers every reference sample but may start and end anywhere on the
    target axis. The end column is the first minimum of the last accumulated row.
    """
    if d.shape != (len(x), len(y)):
        raise DataError(f"distance matrix shape {d.shape} does not match ({len(x)}, {len(y)})")
    c = accumulate(d, open_start=True)
    end = int(np.argmin(c.entries[-1]))
    path = traceback(c, end=end, open_start=True)
    if path.pairs[0, 0] != 0 or path.pairs[-1, 0] != len(x) - 1:
        raise InvariantViolation("open-end path does not cover the reference")
    result = _checked(d, c, path, c.entries[-1, end], keep_accumulated)
    log.debug("open-end alignment: target %d..%d cost %.6g", path.pairs[0, 1], end, result.distance)
    return result
