"""
Run configuration: every matching and descriptor knob in one flat, JSON-loadable record.

    {
      "window_ft": 20,
      "margin_frac": 0.1,
      "descriptor": "hog1d+raw",
      "cell_size": 60
    }

Keys left out keep their defaults; unknown keys are rejected.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union, get_args

from .depth_match import MatchConfig
from .descriptors import DescriptorConfig
from .exceptions import ConfigError
from .types import DescriptorName

_INT_KEYS = {"radius", "cell_size", "num_bins", "block_size", "band"}
_FLOAT_KEYS = {"window_ft", "margin_frac", "gradient_scale", "hog_weight", "raw_weight", "samples_per_ft"}
_OPTIONAL_KEYS = {"radius", "samples_per_ft", "band"}


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        if key in _OPTIONAL_KEYS:
            return None
        raise ConfigError(f"config key {key!r} may not be null")
    if key == "descriptor":
        if value not in get_args(DescriptorName):
            raise ConfigError(
                f"config key 'descriptor' must be one of {', '.join(get_args(DescriptorName))} (got {value!r})"
            )
        return value
    # bool is an int subclass; neither key family accepts it
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {key!r} must be a number (got {value!r})")
    if key in _INT_KEYS:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"config key {key!r} must be an integer (got {value!r})")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"config key {key!r} must be finite (got {value!r})")
    return float(value)


@dataclass(frozen=True)
class RunConfig:
    window_ft: float = 20.0
    margin_frac: float = 0.1
    descriptor: DescriptorName = "hog1d+raw"
    radius: Optional[int] = None
    cell_size: int = 60
    num_bins: int = 10
    block_size: int = 2
    gradient_scale: float = 1.0
    hog_weight: float = 1.0
    raw_weight: float = 1.0
    samples_per_ft: Optional[float] = None
    band: Optional[int] = None

    @classmethod
    def keys(cls) -> tuple:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> RunConfig:
        unknown = sorted(set(data) - set(cls.keys()))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        return cls(**{k: _coerce(k, v) for k, v in data.items()})

    @classmethod
    def load(cls, path: Union[str, Path]) -> RunConfig:
        p = Path(path)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"{p}: cannot read config ({e.strerror or e})") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"{p}:{e.lineno}: invalid JSON ({e.msg})") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{p}: config must be a JSON object")
        return cls.from_mapping(data)

    def merged(self, overrides: Mapping[str, Any]) -> RunConfig:
        """Applies overrides whose value is not None (unset command-line flags)."""
        given = {k: v for k, v in overrides.items() if v is not None}
        unknown = sorted(set(given) - set(self.keys()))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        return replace(self, **{k: _coerce(k, v) for k, v in given.items()})

    def descriptor_config(self) -> DescriptorConfig:
        return DescriptorConfig.from_name(
            self.descriptor,
            radius=self.radius,
            cell_size=self.cell_size,
            num_bins=self.num_bins,
            block_size=self.block_size,
            gradient_scale=self.gradient_scale,
            hog_weight=self.hog_weight,
            raw_weight=self.raw_weight,
        )

    def match_config(self) -> MatchConfig:
        return MatchConfig(
            window_ft=self.window_ft,
            margin_frac=self.margin_frac,
            descriptor=self.descriptor_config(),
            samples_per_ft=self.samples_per_ft,
            band_halfwidth=self.band,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
