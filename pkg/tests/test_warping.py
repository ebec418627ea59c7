from __future__ import annotations

import numpy as np
import pytest
from conftest import brute_force_dtw

from shapedtw_depth.descriptors import DescriptorConfig, FeatureMatrix, feature_matrix
from shapedtw_depth.exceptions import DataError, InvariantViolation
from shapedtw_depth.signals import Signal
from shapedtw_depth.synthetic import WarpSpec, generate_synthetic_pair
from shapedtw_depth.warping import (
    AlignmentResult,
    CostMatrix,
    WarpPath,
    accumulate,
    align,
    apply_band,
    dtw,
    open_end_dtw,
    pointwise_distance_matrix,
    shape_distance_matrix,
    shape_dtw,
    traceback,
)

X = Signal([0.0, 1.0, 0.0])
Y = Signal([0.0, 0.0, 1.0, 1.0, 0.0])


def test_pointwise_distance_matrix_examples():
    assert pointwise_distance_matrix(Signal([0.0, 1.0]), Signal([1.0])).entries.tolist() == [[1.0], [0.0]]
    assert pointwise_distance_matrix(X, Y).entries[1].tolist() == [1.0, 1.0, 0.0, 0.0, 1.0]
    d = pointwise_distance_matrix(Y, Y)
    assert np.all(np.diag(d.entries) == 0)


def test_shape_distance_matrix_examples():
    e = FeatureMatrix(np.eye(2))
    d = shape_distance_matrix(FeatureMatrix(np.array([[1.0, 0.0]])), FeatureMatrix(np.array([[0.0, 1.0]])))
    assert d.entries[0, 0] == pytest.approx(np.sqrt(2.0))
    assert np.all(np.diag(shape_distance_matrix(e, e).entries) == 0)
    with pytest.raises(DataError, match="feature dimension mismatch"):
        shape_distance_matrix(e, FeatureMatrix(np.ones((2, 3))))


def test_raw_radius_zero_features_match_pointwise(rng):
    x, y = Signal(rng.normal(size=20)), Signal(rng.normal(size=25))
    raw0 = DescriptorConfig("raw", radius=0)
    shape = shape_distance_matrix(feature_matrix(x, raw0), feature_matrix(y, raw0))
    assert np.array_equal(shape.entries, pointwise_distance_matrix(x, y).entries)


def test_accumulate_examples():
    c = accumulate(CostMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]), kind="pointwise"))
    assert c.entries.tolist() == [[0.0, 1.0], [1.0, 0.0]]
    zeros = accumulate(CostMatrix(np.zeros((3, 4)), kind="pointwise"))
    assert np.all(zeros.entries == 0)


def test_accumulated_cost_dominates_distance(rng):
    d = pointwise_distance_matrix(Signal(rng.normal(size=9)), Signal(rng.normal(size=7)))
    assert np.all(accumulate(d).entries >= d.entries)


def test_textbook_pair_accumulates_to_zero_and_traces_expected_path():
    d = pointwise_distance_matrix(X, Y)
    c = accumulate(d)
    assert c.entries[2, 4] == 0
    path = traceback(c)
    assert path.as_tuples() == [(0, 0), (0, 1), (1, 2), (1, 3), (2, 4)]
    assert path.cost(d) == 0
    assert brute_force_dtw(X.values, Y.values) == 0


def test_traceback_single_cell():
    path = traceback(accumulate(CostMatrix(np.array([[3.0]]), kind="pointwise")))
    assert path.as_tuples() == [(0, 0)]


def test_dtw_identity_is_diagonal(rng):
    x = Signal(rng.normal(size=30))
    result = dtw(x, x)
    assert result.distance == 0
    assert result.path.is_diagonal()
    assert len(result.path) == 30


def test_dtw_textbook_distance_and_symmetry():
    assert dtw(X, Y).distance == 0
    a, b = Signal([1.0, 3.0, 4.0, 9.0]), Signal([1.0, 2.0, 8.0])
    assert dtw(a, b).distance == dtw(b, a).distance


def test_dtw_matches_brute_force_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        m, n = rng.integers(2, 9, size=2)
        x = rng.integers(0, 5, size=m).astype(float)
        y = rng.integers(0, 5, size=n).astype(float)
        assert dtw(Signal(x), Signal(y)).distance == brute_force_dtw(x.tolist(), y.tolist())


def test_dtw_is_bounded_by_lockstep_distance(rng):
    for _ in range(20):
        x, y = rng.normal(size=40), rng.normal(size=40)
        assert dtw(Signal(x), Signal(y)).distance <= np.abs(x - y).sum() + 1e-12


def test_dtw_distance_equals_path_cost(rng):
    x, y = Signal(rng.normal(size=33)), Signal(rng.normal(size=41))
    result = dtw(x, y)
    d = pointwise_distance_matrix(x, y)
    assert result.path.cost(d) == pytest.approx(result.distance, rel=1e-9)
    assert result.accumulated is not None
    assert dtw(x, y, keep_accumulated=False).accumulated is None


def test_shape_dtw_raw_radius_zero_degenerates_to_dtw():
    rng = np.random.default_rng(77)
    raw0 = DescriptorConfig("raw", radius=0)
    for _ in range(50):
        x = Signal(rng.normal(size=rng.integers(2, 65)))
        y = Signal(rng.normal(size=rng.integers(2, 65)))
        plain, shaped = dtw(x, y), shape_dtw(x, y, raw0)
        assert shaped.distance == plain.distance
        assert np.array_equal(shaped.path.pairs, plain.path.pairs)


def test_shape_dtw_identity(rng):
    x = Signal(rng.normal(size=80))
    result = shape_dtw(x, x, DescriptorConfig.from_name("hog1d+raw", cell_size=8))
    assert result.distance == 0
    assert result.path.is_diagonal()


def test_shape_dtw_hog1d_paths_ignore_constant_offset(rng):
    cfg = DescriptorConfig("hog1d", radius=8, cell_size=4, num_bins=6, block_size=2)
    x = rng.integers(-20, 20, size=60).astype(float)
    y = rng.integers(-20, 20, size=50).astype(float)
    a = shape_dtw(Signal(x), Signal(y), cfg)
    b = shape_dtw(Signal(x + 37.0), Signal(y + 37.0), cfg)
    assert np.array_equal(a.path.pairs, b.path.pairs)


def test_shape_dtw_has_shorter_runs_than_dtw_on_noisy_steps():
    ref, target, _ = generate_synthetic_pair(512, "step-train", WarpSpec.constant(0), 0.3, seed=3)
    plain = dtw(ref, target)
    shaped = shape_dtw(ref, target, DescriptorConfig.from_name("hog1d+raw"))
    assert shaped.path.max_run_length() < plain.path.max_run_length()


def test_open_end_finds_padded_copy():
    x = Signal([1.0, 2.0, 3.0, 4.0])
    y = Signal([0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 0.0, 0.0])
    result = open_end_dtw(x, y, pointwise_distance_matrix(x, y))
    assert result.distance == 0
    assert result.path.as_tuples() == [(0, 2), (1, 3), (2, 4), (3, 5)]
    assert not result.path.closed_start and not result.path.closed_end


def test_open_end_on_identical_signals_matches_closed_dtw():
    x = Signal([1.0, 2.5, 3.0, 4.5, 7.0])
    open_result = open_end_dtw(x, x, pointwise_distance_matrix(x, x))
    closed = dtw(x, x)
    assert open_result.distance == closed.distance == 0
    assert np.array_equal(open_result.path.pairs, closed.path.pairs)


def test_open_end_single_row():
    x, y = Signal([3.0]), Signal([0.0, 3.0, 5.0])
    result = open_end_dtw(x, y, pointwise_distance_matrix(x, y))
    assert result.path.as_tuples() == [(0, 1)]


def test_open_end_rejects_mismatched_matrix():
    x, y = Signal([1.0, 2.0]), Signal([1.0, 2.0, 3.0])
    with pytest.raises(DataError):
        open_end_dtw(x, y, pointwise_distance_matrix(y, x))


def test_band_masks_and_too_narrow_band_fails(rng):
    d = pointwise_distance_matrix(Signal(rng.normal(size=10)), Signal(rng.normal(size=10)))
    banded = apply_band(d, 2)
    assert np.isinf(banded.entries[0, 5])
    assert np.isfinite(banded.entries[4, 6])
    result = align(banded)
    assert np.all(np.abs(result.path.ref_indices - result.path.target_indices) <= 2)

    wide = pointwise_distance_matrix(Signal(np.zeros(2)), Signal(np.zeros(6)))
    with pytest.raises(DataError, match="band too narrow"):
        align(apply_band(wide, 0))


def test_offset_band_centre_stays_inside_the_columns():
    d = pointwise_distance_matrix(Signal(np.zeros(5)), Signal(np.zeros(6)))
    late = apply_band(d, 1, offset=3).entries
    assert np.isfinite(late[0, 2:5]).all() and np.isinf(late[0, [0, 1, 5]]).all()
    # rows 3 and 4 would centre past the last column
    assert np.isfinite(late[4, 4:]).all() and np.isinf(late[4, :4]).all()
    early = apply_band(d, 1, offset=-3).entries
    assert np.isfinite(early[0, :2]).all() and np.isinf(early[0, 2:]).all()
    result = open_end_dtw(Signal(np.zeros(5)), Signal(np.zeros(6)), apply_band(d, 0, offset=3))
    assert result.path.as_tuples()[-1] == (4, 5)


@pytest.mark.parametrize(
    "pairs, shape",
    [
        ([(0, 0), (2, 1)], (3, 2)),
        ([(0, 0), (1, 1), (0, 2)], (2, 3)),
        ([(0, 1), (1, 1)], (2, 2)),
        ([(0, 0), (1, 0)], (2, 2)),
        ([(0, 0), (1, 3)], (2, 3)),
    ],
)
def test_warp_path_rejects_invalid_paths(pairs, shape):
    with pytest.raises(InvariantViolation):
        WarpPath(np.array(pairs), shape=shape)


def test_warp_path_run_lengths():
    path = WarpPath(np.array([(0, 0), (1, 0), (2, 0), (3, 1), (3, 2)]), shape=(4, 3))
    assert path.max_run_length() == 3
    assert WarpPath(np.array([(0, 0), (1, 1)]), shape=(2, 2)).max_run_length() == 1


def test_alignment_result_offsets_target_indices():
    path = WarpPath(np.array([(0, 0), (1, 1)]), shape=(2, 2))
    moved = AlignmentResult(0.5, path).with_target_offset(10, 20)
    assert moved.path.as_tuples() == [(0, 10), (1, 11)]
    assert moved.path.shape == (2, 20)
    with pytest.raises(InvariantViolation):
        AlignmentResult(-1.0, path)


def test_cost_matrix_rejects_nan_and_negative():
    with pytest.raises(InvariantViolation):
        CostMatrix(np.array([[np.nan]]), kind="pointwise")
    with pytest.raises(InvariantViolation):
        CostMatrix(np.array([[-1.0]]), kind="shape")
