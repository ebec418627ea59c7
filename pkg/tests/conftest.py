from __future__ import annotations

from pathlib import Path
from typing import Sequence, Tuple

import numpy as np
import pytest

from shapedtw_depth.fileio import write_image, write_signal
from shapedtw_depth.signals import BoreholeImage, Signal


def brute_force_dtw(x: Sequence[float], y: Sequence[float]) -> float:
    """Minimum path cost over every monotone path, enumerated without memoisation."""
    m, n = len(x), len(y)
    cost = [[abs(float(a) - float(b)) for b in y] for a in x]

    def walk(i: int, j: int, acc: float) -> float:
        acc += cost[i][j]
        if i == m - 1 and j == n - 1:
            return acc
        best = float("inf")
        if i + 1 < m and j + 1 < n:
            best = min(best, walk(i + 1, j + 1, acc))
        if i + 1 < m:
            best = min(best, walk(i + 1, j, acc))
        if j + 1 < n:
            best = min(best, walk(i, j + 1, acc))
        return best

    return walk(0, 0, 0.0)


def cross_correlation_lag(a: np.ndarray, b: np.ndarray, max_lag: int) -> int:
    """Lag k maximising the Pearson correlation of a[i] with b[i + k] over their overlap."""
    best_lag, best_r = 0, -np.inf
    n = len(a)
    for k in range(-max_lag, max_lag + 1):
        lo, hi = max(0, -k), min(n, n - k)
        r = np.corrcoef(a[lo:hi], b[lo + k:hi + k])[0, 1]
        if r > best_r:
            best_lag, best_r = k, r
    return best_lag


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def random_image(rng: np.random.Generator) -> BoreholeImage:
    return BoreholeImage(rng.normal(size=(300, 8)), depth_start=1000.0, sample_interval=0.1)


@pytest.fixture
def image_file(tmp_path: Path, random_image: BoreholeImage) -> Path:
    return write_image(tmp_path / "image.csv", random_image)


@pytest.fixture
def signal_files(tmp_path: Path) -> Tuple[Path, Path]:
    x = write_signal(tmp_path / "x.csv", Signal([0.0, 1.0, 0.0]))
    y = write_signal(tmp_path / "y.csv", Signal([0.0, 0.0, 1.0, 1.0, 0.0]))
    return x, y
