"""
Seeded synthetic reference/target pairs with a known depth warp.

A base series (or banded image) longer than the requested section is generated first; the
reference is a direct slice of it and the target is resampled from it at the inverse-warp
positions by linear interpolation, so warping never extrapolates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, get_args

import numpy as np

from .exceptions import ConfigError, DataError, WarpRangeError
from .signals import BoreholeImage, GroundTruthWarp, Signal
from .types import TextureKind, WarpKind

BASE_MARGIN = 16

_WARP_ALIASES = {
    "constant": "constant",
    "ramp": "linear-ramp",
    "linear-ramp": "linear-ramp",
    "piecewise": "piecewise-linear",
    "piecewise-linear": "piecewise-linear",
}


@dataclass(frozen=True)
class WarpSpec:
    """
    Shift (in samples) as a function of reference index.

    constant:          params = (k,)
    linear-ramp:       params = (start, end), linear over the section
    piecewise-linear:  params = knot shifts, knots evenly spaced over the section
    """

    kind: WarpKind
    params: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in get_args(WarpKind):
            raise ConfigError(f"unknown warp kind {self.kind!r}")
        if any(not math.isfinite(p) for p in self.params):
            raise ConfigError("warp parameters must be finite")
        expected = {"constant": 1, "linear-ramp": 2}.get(self.kind)
        if expected is not None and len(self.params) != expected:
            raise ConfigError(f"{self.kind} warp takes {expected} parameter(s), got {len(self.params)}")
        if self.kind == "piecewise-linear" and len(self.params) < 2:
            raise ConfigError("piecewise-linear warp needs at least 2 knots")

    @classmethod
    def constant(cls, shift: float) -> WarpSpec:
        return cls("constant", (float(shift),))

    @classmethod
    def ramp(cls, start: float, end: float) -> WarpSpec:
        return cls("linear-ramp", (float(start), float(end)))

    @classmethod
    def piecewise(cls, knots: Sequence[float]) -> WarpSpec:
        return cls("piecewise-linear", tuple(float(k) for k in knots))

    @classmethod
    def parse(cls, text: str) -> WarpSpec:
        """
        Parses the command-line form:
          constant:5   ramp:0:8   piecewise:0,10,0,-10,0
        """
        name, _, rest = text.strip().partition(":")
        kind = _WARP_ALIASES.get(name.strip().lower())
        if kind is None:
            raise ConfigError(f"unknown warp kind {name!r} (use constant, ramp or piecewise)")
        fields = [f for f in rest.replace(",", ":").split(":") if f.strip()]
        try:
            params = tuple(float(f) for f in fields)
        except ValueError as e:
            raise ConfigError(f"invalid warp spec {text!r}: {e}") from e
        return cls(kind, params)  # type: ignore[arg-type]

    @property
    def max_abs_shift(self) -> float:
        return max(abs(p) for p in self.params)

    def _knots(self, length: int) -> Tuple[np.ndarray, np.ndarray]:
        last = float(max(length - 1, 1))
        if self.kind == "constant":
            return np.array([0.0, last]), np.array([self.params[0]] * 2)
        if self.kind == "linear-ramp":
            return np.array([0.0, last]), np.array(self.params)
        return np.linspace(0.0, last, len(self.params)), np.array(self.params)

    def shift_at(self, positions: np.ndarray, length: int) -> np.ndarray:
        """Shift at (possibly fractional) reference positions; held constant past the ends."""
        xs, ys = self._knots(length)
        return np.interp(np.asarray(positions, dtype=float), xs, ys)


def _base_texture(kind: TextureKind, n: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(n, dtype=float)
    if kind == "sinusoid-mix":
        out = np.zeros(n)
        for _ in range(5):
            period = rng.uniform(12.0, 90.0)
            phase = rng.uniform(0.0, 2 * np.pi)
            amp = rng.uniform(0.5, 1.5)
            out += amp * np.sin(2 * np.pi * t / period + phase)
        return out

    if kind == "step-train":
        lengths = rng.integers(12, 48, size=n // 12 + 2)
        edges = np.cumsum(lengths)
        levels = rng.normal(0.0, 1.0, size=edges.size + 1)
        return levels[np.searchsorted(edges, t, side="right")]

    if kind == "fracture-sinusoid":
        out = 0.5 * np.sin(2 * np.pi * t / rng.uniform(60.0, 150.0) + rng.uniform(0.0, 2 * np.pi))
        n_spikes = max(n // 40, 1)
        centers = rng.uniform(0.0, n, size=n_spikes)
        widths = rng.uniform(1.5, 4.0, size=n_spikes)
        amps = rng.choice([-1.0, 1.0], size=n_spikes) * rng.uniform(1.0, 2.5, size=n_spikes)
        for c, w, a in zip(centers, widths, amps):
            out += a * np.exp(-0.5 * ((t - c) / w) ** 2)
        return out

    raise ConfigError(f"unknown texture {kind!r}")


def _layout(length: int, warp: WarpSpec) -> Tuple[int, int, np.ndarray, GroundTruthWarp]:
    """
    Sizes the base series and computes the base positions of every target sample.
    Returns (base_length, offset, target_positions, truth); the reference is
    base[offset:offset + length].
    """
    reach = int(math.ceil(warp.max_abs_shift))
    if reach >= length:
        raise WarpRangeError("warp out of range")
    truth = GroundTruthWarp(warp.shift_at(np.arange(length), length))

    offset = reach + BASE_MARGIN // 2
    base_length = length + 2 * reach + BASE_MARGIN

    grid = np.arange(-offset, base_length - offset, dtype=float)
    mapped = grid + warp.shift_at(grid, length)
    if np.any(np.diff(mapped) <= 0):
        raise DataError("warp is not monotone (slope below -1)")
    positions = np.interp(np.arange(length, dtype=float), mapped, grid) + offset
    if positions[0] < 0 or positions[-1] > base_length - 1:
        raise WarpRangeError("warp out of range")
    return base_length, offset, positions, truth


def _sample_rows(base: np.ndarray, positions: np.ndarray) -> np.ndarray:
    lo = np.clip(np.floor(positions).astype(np.intp), 0, base.shape[0] - 2)
    frac = positions - lo
    if base.ndim == 2:
        frac = frac[:, None]
    return base[lo] * (1.0 - frac) + base[lo + 1] * frac


def _check_noise(noise_sigma: float) -> None:
    if not (math.isfinite(noise_sigma) and noise_sigma >= 0):
        raise DataError(f"noise_sigma must be >= 0 (got {noise_sigma})")


def generate_synthetic_pair(
    length: int,
    texture: TextureKind,
    warp: WarpSpec,
    noise_sigma: float = 0.0,
    seed: int = 0,
    *,
    depth_start: float = 0.0,
    sample_interval: float = 1.0,
) -> Tuple[Signal, Signal, GroundTruthWarp]:
    if length < 16:
        raise DataError(f"synthetic length must be >= 16 (got {length})")
    _check_noise(noise_sigma)

    base_length, offset, positions, truth = _layout(length, warp)
    rng = np.random.default_rng(seed)
    base = _base_texture(texture, base_length, rng)

    reference = base[offset:offset + length].copy()
    target = _sample_rows(base, positions)
    reference += rng.normal(0.0, noise_sigma, size=length) if noise_sigma else 0.0
    target += rng.normal(0.0, noise_sigma, size=length) if noise_sigma else 0.0

    return (
        Signal(reference, depth_start=depth_start, sample_interval=sample_interval),
        Signal(target, depth_start=depth_start, sample_interval=sample_interval),
        truth,
    )


def _banded_image(
    base_length: int,
    n_azimuth: int,
    dip_events: int,
    rng: np.random.Generator,
) -> np.ndarray:
    bands = 0.6 * _base_texture("step-train", base_length, rng)
    bands += 0.4 * _base_texture("sinusoid-mix", base_length, rng)
    image = np.repeat(bands[:, None], n_azimuth, axis=1)
    if dip_events <= 0:
        return image

    rows = np.arange(base_length, dtype=float)[:, None]
    azimuth = 2 * np.pi * np.arange(n_azimuth, dtype=float)[None, :] / n_azimuth
    for _ in range(dip_events):
        center = rng.uniform(0.0, base_length)
        amplitude = rng.uniform(3.0, 12.0)
        phase = rng.uniform(0.0, 2 * np.pi)
        width = rng.uniform(1.0, 2.5)
        contrast = rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 2.5)
        trace = center + amplitude * np.sin(azimuth + phase)
        image += contrast * np.exp(-0.5 * ((rows - trace) / width) ** 2)
    return image


def generate_synthetic_image_pair(
    n_depth: int,
    n_azimuth: int,
    warp: WarpSpec,
    dip_events: int = 6,
    seed: int = 0,
    *,
    noise_sigma: float = 0.0,
    depth_start: float = 0.0,
    sample_interval: float = 1.0,
) -> Tuple[BoreholeImage, BoreholeImage, GroundTruthWarp]:
    """
    Banded background with sinusoidal (fracture-like) dip traces; the target is the reference
    warped along depth, every column by the same warp.
    """
    if n_depth < 32:
        raise DataError(f"n_depth must be >= 32 (got {n_depth})")
    if n_azimuth < 4:
        raise DataError(f"n_azimuth must be >= 4 (got {n_azimuth})")
    if dip_events < 0:
        raise DataError(f"dip_events must be >= 0 (got {dip_events})")
    _check_noise(noise_sigma)

    base_length, offset, positions, truth = _layout(n_depth, warp)
    rng = np.random.default_rng(seed)
    base = _banded_image(base_length, n_azimuth, dip_events, rng)

    reference = base[offset:offset + n_depth].copy()
    target = _sample_rows(base, positions)
    shape = (n_depth, n_azimuth)
    reference += rng.normal(0.0, noise_sigma, size=shape) if noise_sigma else 0.0
    target += rng.normal(0.0, noise_sigma, size=shape) if noise_sigma else 0.0

    return (
        BoreholeImage(reference, depth_start=depth_start, sample_interval=sample_interval),
        BoreholeImage(target, depth_start=depth_start, sample_interval=sample_interval),
        truth,
    )
