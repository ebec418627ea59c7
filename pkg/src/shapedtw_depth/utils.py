from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Union

import numpy as np

SIGNIFICANT_DIGITS = 9


def format_value(value: float) -> str:
    """
    Formats a number for CSV output with 9 significant digits:
      1000.0 -> "1000", 0.1 -> "0.1", 1/3 -> "0.333333333"
    """
    return f"{float(value):.{SIGNIFICANT_DIGITS}g}"


def relative_close(a: float, b: float, rtol: float = 1e-9) -> bool:
    if a == b:
        return True
    scale = max(abs(a), abs(b), 1.0)
    return abs(a - b) <= rtol * scale


def exact_sum(values: Iterable[float]) -> float:
    return math.fsum(values)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def longest_run(labels: np.ndarray) -> int:
    """
    Length of the longest stretch of equal consecutive values:
      [0, 1, 1, 1, 2] -> 3
    """
    if labels.size == 0:
        return 0
    breaks = np.flatnonzero(np.diff(labels) != 0)
    edges = np.concatenate(([-1], breaks, [labels.size - 1]))
    return int(np.diff(edges).max())


def ensure_dir(path: Union[str, Path]) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
