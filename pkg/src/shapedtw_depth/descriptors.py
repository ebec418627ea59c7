"""
Local subsequences and shape descriptors.

Every descriptor is implemented once over a matrix of subsequences (one per row); the
single-subsequence functions run the same code on a one-row matrix, so per-sample and
whole-signal results are bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, get_args

import numpy as np

from .exceptions import ConfigError, DataError, InvariantViolation
from .signals import Signal
from .types import DescriptorKind, DescriptorName

HOG_NORM_EPS = 1e-12
ZNORM_MIN_STD = 1e-12


@dataclass(frozen=True)
class DescriptorConfig:
    kind: DescriptorKind = "hog1d"
    radius: Optional[int] = None
    cell_size: int = 60
    num_bins: int = 10
    block_size: int = 2
    gradient_scale: float = 1.0
    members: Tuple[Tuple["DescriptorConfig", float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in get_args(DescriptorKind):
            raise ConfigError(f"unknown descriptor kind {self.kind!r}")
        if self.radius is not None and self.radius < 0:
            raise ConfigError(f"radius must be >= 0 (got {self.radius})")
        if self.cell_size < 2:
            raise ConfigError(f"cell_size must be >= 2 (got {self.cell_size})")
        if self.num_bins < 2:
            raise ConfigError(f"num_bins must be >= 2 (got {self.num_bins})")
        if self.block_size < 1:
            raise ConfigError(f"block_size must be >= 1 (got {self.block_size})")
        if not self.gradient_scale > 0:
            raise ConfigError(f"gradient_scale must be > 0 (got {self.gradient_scale})")

        if self.kind != "compound":
            if self.members:
                raise ConfigError("only compound descriptors take members")
            return

        if not self.members:
            raise ConfigError("compound descriptor needs at least one member")
        for member, weight in self.members:
            if member.kind == "compound":
                raise ConfigError("compound members may not themselves be compound")
            if weight < 0:
                raise ConfigError(f"member weights must be >= 0 (got {weight})")
        if all(weight == 0 for _, weight in self.members):
            raise ConfigError("degenerate compound")
        radius = self.resolved_radius
        for member, _ in self.members:
            if member.radius is not None and member.radius != radius:
                raise ConfigError(
                    f"compound member radius {member.radius} differs from compound radius {radius}"
                )

    @property
    def resolved_radius(self) -> int:
        if self.radius is not None:
            return self.radius
        if self.kind == "compound":
            return self.members[0][0].resolved_radius
        return 2 * self.cell_size

    @classmethod
    def from_name(
        cls,
        name: DescriptorName,
        *,
        radius: Optional[int] = None,
        cell_size: int = 60,
        num_bins: int = 10,
        block_size: int = 2,
        gradient_scale: float = 1.0,
        hog_weight: float = 1.0,
        raw_weight: float = 1.0,
    ) -> DescriptorConfig:
        common = dict(
            radius=radius,
            cell_size=cell_size,
            num_bins=num_bins,
            block_size=block_size,
            gradient_scale=gradient_scale,
        )
        if name == "hog1d":
            return cls("hog1d", **common)  # type: ignore[arg-type]
        if name == "raw":
            return cls("raw", **common)  # type: ignore[arg-type]
        if name == "grad":
            return cls("gradient", **common)  # type: ignore[arg-type]
        if name == "hog1d+raw":
            hog = cls("hog1d", **common)  # type: ignore[arg-type]
            raw = cls("raw", **common)  # type: ignore[arg-type]
            return cls("compound", radius=radius, cell_size=cell_size, members=((hog, hog_weight), (raw, raw_weight)))
        raise ConfigError(f"unknown descriptor {name!r} (use {', '.join(get_args(DescriptorName))})")

    def describe(self) -> str:
        if self.kind == "compound":
            inner = " + ".join(f"{w:g}*{m.describe()}" for m, w in self.members)
            return f"compound[r={self.resolved_radius}]({inner})"
        if self.kind == "hog1d":
            return (
                f"hog1d[r={self.resolved_radius}, cell={self.cell_size}, "
                f"bins={self.num_bins}, block={self.block_size}]"
            )
        return f"{self.kind}[r={self.resolved_radius}]"


def default_descriptor() -> DescriptorConfig:
    """HOG-1D(60, 10, 2) + raw, weights 1 and 1."""
    return DescriptorConfig.from_name("hog1d+raw")


@dataclass(frozen=True, eq=False)
class Subsequence:
    values: np.ndarray
    center_index: int
    radius: int

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size != 2 * self.radius + 1:
            raise InvariantViolation(
                f"subsequence of radius {self.radius} must hold {2 * self.radius + 1} samples"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise InvariantViolation(f"feature matrix must be a non-empty 2D array (got {rows.shape})")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.rows.shape[1])

    def take(self, start: int, stop: int) -> FeatureMatrix:
        return FeatureMatrix(self.rows[start:stop])


@dataclass(frozen=True, eq=False)
class MemberStats:
    """Per-coordinate z-normalization statistics of one compound member over one signal."""

    mean: np.ndarray
    scale: np.ndarray


def _subsequence_rows(values: np.ndarray, radius: int) -> np.ndarray:
    n = values.shape[0]
    idx = np.arange(n)[:, None] + np.arange(-radius, radius + 1)[None, :]
    return values[np.clip(idx, 0, n - 1)]


def extract_subsequence(signal: Signal, i: int, r: int) -> Subsequence:
    """Samples i-r..i+r; positions outside the signal replicate the first/last sample."""
    n = len(signal)
    if not 0 <= i < n:
        raise DataError(f"index out of range: {i} not in [0, {n})")
    if r < 0:
        raise ConfigError(f"radius must be >= 0 (got {r})")
    idx = np.clip(np.arange(i - r, i + r + 1), 0, n - 1)
    return Subsequence(signal.values[idx], center_index=i, radius=r)


def _first_differences(rows: np.ndarray) -> np.ndarray:
    padded = np.pad(rows, ((0, 0), (1, 1)), mode="edge")
    return (padded[:, 2:] - padded[:, :-2]) / 2.0


def _second_differences(rows: np.ndarray) -> np.ndarray:
    padded = np.pad(rows, ((0, 0), (1, 1)), mode="edge")
    return padded[:, 2:] - 2.0 * padded[:, 1:-1] + padded[:, :-2]


def _raw_rows(rows: np.ndarray) -> np.ndarray:
    return rows.copy()


def _gradient_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] < 3:
        raise ConfigError("subsequence too short for gradients")
    return np.hstack([_first_differences(rows), _second_differences(rows)])


def hog1d_layout(length: int, cfg: DescriptorConfig) -> Tuple[int, int, int]:
    """(n_cells, n_blocks, cells_per_block) for subsequences of ``length`` samples."""
    n_cells = max(length // cfg.cell_size, 1)
    n_blocks = max(n_cells - cfg.block_size + 1, 1)
    return n_cells, n_blocks, min(cfg.block_size, n_cells)


def _hog1d_rows(rows: np.ndarray, cfg: DescriptorConfig) -> np.ndarray:
    n, length = rows.shape
    bins = cfg.num_bins
    n_cells, n_blocks, width = hog1d_layout(length, cfg)

    g = _first_differences(rows) * cfg.gradient_scale
    theta = np.arctan(g)
    votes = np.sqrt(1.0 + g * g)

    # half-open bins over [-pi/2, pi/2); theta == 0 lands at bins // 2 exactly
    bin_idx = np.floor((theta / np.pi + 0.5) * bins).astype(np.intp)
    np.clip(bin_idx, 0, bins - 1, out=bin_idx)

    # remainder samples join the last cell
    cell_idx = np.minimum(np.arange(length) // cfg.cell_size, n_cells - 1)
    slots = cell_idx[None, :] * bins + bin_idx

    hist = np.zeros((n, n_cells * bins))
    np.add.at(hist, (np.repeat(np.arange(n), length), slots.ravel()), votes.ravel())

    blocks = np.stack(
        [hist[:, b * bins:(b + width) * bins] for b in range(n_blocks)],
        axis=1,
    )
    norms = np.linalg.norm(blocks, axis=2, keepdims=True) + HOG_NORM_EPS
    return (blocks / norms).reshape(n, n_blocks * width * bins)


def _descriptor_rows(rows: np.ndarray, cfg: DescriptorConfig) -> np.ndarray:
    if cfg.kind == "raw":
        return _raw_rows(rows)
    if cfg.kind == "gradient":
        return _gradient_rows(rows)
    if cfg.kind == "hog1d":
        return _hog1d_rows(rows, cfg)
    raise ConfigError(f"descriptor kind {cfg.kind!r} has no direct row form")


def _member_stats(features: np.ndarray) -> MemberStats:
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    # near-constant coordinates are only mean-centred
    scale = np.where(std < ZNORM_MIN_STD, 1.0, std)
    return MemberStats(mean=mean, scale=scale)


def compound_statistics(signal: Signal, cfg: DescriptorConfig) -> Tuple[MemberStats, ...]:
    """Per-member statistics over all rows of ``signal``, as used by feature_matrix."""
    if cfg.kind != "compound":
        raise ConfigError("compound_statistics needs a compound descriptor")
    rows = _subsequence_rows(signal.values, cfg.resolved_radius)
    return tuple(_member_stats(_descriptor_rows(rows, m)) for m, _ in cfg.members)


def _compound_rows(
    rows: np.ndarray,
    cfg: DescriptorConfig,
    stats: Optional[Sequence[MemberStats]] = None,
) -> np.ndarray:
    if all(weight == 0 for _, weight in cfg.members):
        raise ConfigError("degenerate compound")
    parts = []
    for k, (member, weight) in enumerate(cfg.members):
        features = _descriptor_rows(rows, member)
        member_stats = stats[k] if stats is not None else _member_stats(features)
        parts.append((features - member_stats.mean) / member_stats.scale * weight)
    return np.hstack(parts)


def raw_descriptor(sub: Subsequence) -> np.ndarray:
    return _raw_rows(sub.values[None, :])[0]


def gradient_descriptor(sub: Subsequence) -> np.ndarray:
    """First-order central differences followed by second-order differences."""
    return _gradient_rows(sub.values[None, :])[0]


def hog1d_descriptor(sub: Subsequence, cfg: DescriptorConfig) -> np.ndarray:
    if cfg.kind != "hog1d":
        raise ConfigError(f"hog1d_descriptor needs a hog1d config (got {cfg.kind!r})")
    return _hog1d_rows(sub.values[None, :], cfg)[0]


def compound_descriptor(
    sub: Subsequence,
    cfg: DescriptorConfig,
    stats: Sequence[MemberStats],
) -> np.ndarray:
    """
    Weighted concatenation of z-normalized member descriptors. ``stats`` are the per-signal
    member statistics from compound_statistics().
    """
    if cfg.kind != "compound":
        raise ConfigError(f"compound_descriptor needs a compound config (got {cfg.kind!r})")
    if len(stats) != len(cfg.members):
        raise ConfigError(f"expected {len(cfg.members)} member statistics, got {len(stats)}")
    return _compound_rows(sub.values[None, :], cfg, stats)[0]


def feature_matrix(signal: Signal, cfg: DescriptorConfig) -> FeatureMatrix:
    """One descriptor row per sample of ``signal``."""
    rows = _subsequence_rows(signal.values, cfg.resolved_radius)
    if cfg.kind == "compound":
        features = _compound_rows(rows, cfg)
    else:
        features = _descriptor_rows(rows, cfg)
    return FeatureMatrix(features)
