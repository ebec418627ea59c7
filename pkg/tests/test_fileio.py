from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from shapedtw_depth.depth_match import MatchConfig, match_depth
from shapedtw_depth.descriptors import DescriptorConfig, feature_matrix
from shapedtw_depth.exceptions import IngestError, OutputError
from shapedtw_depth.fileio import (
    read_image,
    read_signal,
    to_gray8,
    write_feature_matrix,
    write_image,
    write_outputs,
    write_pgm,
    write_signal,
)
from shapedtw_depth.signals import BoreholeImage, Signal
from shapedtw_depth.utils import format_value


def _write(tmp_path: Path, text: str) -> Path:
    p = tmp_path / "in.csv"
    p.write_text(text, encoding="utf-8")
    return p


def _read_pgm(path: Path):
    data = path.read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    width, height = (int(v) for v in dims.split())
    return magic, width, height, int(maxval), np.frombuffer(rest, dtype=np.uint8).reshape(height, width)


def test_read_image_header_and_rows(tmp_path):
    img = read_image(_write(tmp_path, "# depth_start=1000.0\n# sample_interval=0.1\n1,2,3\n4,5,6\n"))
    assert img.depth_start == 1000.0
    assert img.sample_interval == 0.1
    assert img.pixels.tolist() == [[1, 2, 3], [4, 5, 6]]


def test_read_image_repairs_null_sentinel(tmp_path):
    img = read_image(_write(tmp_path, "# depth_start=0\n# sample_interval=1\n1,-999.25,3\n4,5,6\n"))
    assert img.pixels[0].tolist() == [1.0, 2.0, 3.0]


def test_read_image_header_null_value(tmp_path):
    img = read_image(_write(tmp_path, "# depth_start=0\n# sample_interval=1\n# null_value=-1\n2,-1,4\n"))
    assert img.pixels.tolist() == [[2.0, 3.0, 4.0]]


@pytest.mark.parametrize(
    "text, line, reason",
    [
        ("# depth_start=0\n# sample_interval=1\n1,2\n3\n", 4, "ragged row"),
        ("# depth_start=0\n# sample_interval=1\n1,2\n3,abc\n", 4, "non-numeric field"),
        ("# depth_start=0\n\n1,2\n", 3, "missing header key 'sample_interval'"),
        ("# depth_start=0\n# sample_interval=1\n1,2\n-999.25,-999.25\n", 4, "all values in the row are null"),
        ("# depth_start=0\n# sample_interval=x\n1\n", 2, "is not a number"),
        ("# depth_start=0\n# sample_interval=-0.1\n1\n", 2, "sample_interval must be > 0"),
    ],
)
def test_read_image_diagnostics_name_the_line(tmp_path, text, line, reason):
    with pytest.raises(IngestError) as err:
        read_image(_write(tmp_path, text))
    assert err.value.line == line
    assert reason in err.value.reason
    assert f"in.csv:{line}:" in str(err.value)


def test_read_image_rejects_invalid_utf8_with_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_bytes(b"# depth_start=0\n# sample_interval=1\n1,2\n\xff\xfe,3\n")
    with pytest.raises(IngestError, match="not valid UTF-8") as err:
        read_image(path)
    assert err.value.line == 4


def test_read_image_skips_byte_order_mark(tmp_path):
    path = tmp_path / "bom.csv"
    path.write_bytes(b"\xef\xbb\xbf# depth_start=12\n# sample_interval=0.5\n1,2\n")
    img = read_image(path)
    assert img.depth_start == 12.0
    assert img.pixels.tolist() == [[1.0, 2.0]]


def test_read_image_no_data(tmp_path):
    with pytest.raises(IngestError, match="no data rows"):
        read_image(_write(tmp_path, "# depth_start=0\n# sample_interval=1\n"))


def test_read_missing_file(tmp_path):
    with pytest.raises(IngestError, match="cannot read file"):
        read_image(tmp_path / "nope.csv")


def test_read_signal_requires_single_column(tmp_path):
    s = read_signal(_write(tmp_path, "# depth_start=5\n# sample_interval=0.5\n1\n2\n"))
    assert s.values.tolist() == [1.0, 2.0]
    with pytest.raises(IngestError, match="single column"):
        read_signal(_write(tmp_path, "# depth_start=5\n# sample_interval=0.5\n1,2\n"))


def test_image_round_trip_at_nine_significant_digits(tmp_path):
    rng = np.random.default_rng(99)
    for k in range(10):
        pixels = rng.normal(scale=10.0 ** rng.integers(-3, 4), size=(rng.integers(1, 40), rng.integers(1, 9)))
        image = BoreholeImage(pixels, depth_start=float(rng.uniform(0, 5000)), sample_interval=0.1)
        path = tmp_path / f"img{k}.csv"
        back = read_image(write_image(path, image))
        expected = np.vectorize(lambda v: float(format_value(v)))(pixels)
        assert np.array_equal(back.pixels, expected)
        assert back.depth_start == float(format_value(image.depth_start))
        assert back.sample_interval == 0.1


def test_signal_and_feature_csvs_reingest(tmp_path, rng):
    signal = Signal(rng.normal(size=50), depth_start=10.0, sample_interval=0.25)
    assert len(read_signal(write_signal(tmp_path / "s.csv", signal))) == 50

    cfg = DescriptorConfig("hog1d", radius=6, cell_size=4, num_bins=4, block_size=2)
    fm = feature_matrix(signal, cfg)
    back = read_image(write_feature_matrix(tmp_path / "f.csv", fm, signal, descriptor=cfg.describe()))
    assert back.pixels.shape == (50, fm.feature_dim)
    assert back.sample_interval == 0.25


def test_gray8_scaling():
    assert to_gray8(np.array([[0.0, 5.0, 10.0]])).tolist() == [[0, 128, 255]]
    assert to_gray8(np.full((2, 2), 3.0)).tolist() == [[0, 0], [0, 0]]


def test_write_pgm_header_and_dimensions(tmp_path, rng):
    pixels = rng.normal(size=(7, 3))
    magic, width, height, maxval, body = _read_pgm(write_pgm(tmp_path / "q.pgm", pixels))
    assert (magic, width, height, maxval) == (b"P5", 3, 7, 255)
    assert body.min() == 0 and body.max() == 255


def test_write_outputs_identity_match(tmp_path, random_image):
    result = match_depth(random_image, random_image, MatchConfig())
    files = write_outputs(result, tmp_path / "out", run_config={"window_ft": 20.0})
    names = sorted(p.name for p in files.values())
    assert names == sorted([
        "aligned.pgm", "aligned_image.csv", "reduced_ref.csv", "reduced_target.csv",
        "reference.pgm", "shift_curve.csv", "summary.json", "target.pgm", "warp_path.csv",
    ])

    curve = read_image(files["shift_curve"])
    assert np.all(curve.pixels[:, 1] == 0)
    assert np.all(curve.pixels[:, 2] == 0)
    assert read_image(files["warp_path"]).n_depth == len(result.path)

    for key in ("aligned_pgm", "reference_pgm", "target_pgm"):
        _, width, height, _, _ = _read_pgm(files[key])
        assert (width, height) == (random_image.n_azimuth, random_image.n_depth)

    for key, path in files.items():
        if path.suffix == ".csv":
            assert read_image(path).depth_start == random_image.depth_start, key

    summary = json.loads(files["summary"].read_text(encoding="utf-8"))
    assert summary["config"] == {"window_ft": 20.0}
    assert summary["window_samples"] == 200
    assert len(summary["windows"]) == 2
    assert summary["curve"]["max_abs_shift_samples"] == 0


def test_write_outputs_surfaces_io_failures(tmp_path, random_image):
    result = match_depth(random_image, random_image, MatchConfig())
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    with pytest.raises(OutputError) as err:
        write_outputs(result, blocker)
    assert "blocker" in str(err.value)
