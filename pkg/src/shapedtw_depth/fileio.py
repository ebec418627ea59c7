"""
Text CSV with comment-line headers, and 8-bit PGM quick-looks.

    # depth_start=1000.0
    # sample_interval=0.1
    # null_value=-999.25        (optional)
    # columns=depth,shift       (optional)
    1.25,3.5,-999.25
    ...

Every table this module writes carries the registration header, so it reads back through
read_image().
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .depth_match import DepthShiftCurve, MatchResult
from .descriptors import FeatureMatrix
from .exceptions import IngestError, NullRowError, OutputError
from .signals import DEFAULT_NULL_VALUE, BoreholeImage, GroundTruthWarp, Signal, repair_null_pixels
from .utils import ensure_dir, format_value
from .warping import WarpPath

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _parse_table(path: Path) -> Tuple[Dict[str, Tuple[str, int]], np.ndarray, List[int]]:
    """Returns (header key -> (value, line), body rows, body line numbers)."""
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IngestError(f"cannot read file ({e.strerror or e})", path=path) from e
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        line = data[: e.start].count(b"\n") + 1
        raise IngestError(f"file is not valid UTF-8 (byte {data[e.start]:#04x})", path=path, line=line) from e

    header: Dict[str, Tuple[str, int]] = {}
    rows: List[List[float]] = []
    lines: List[int] = []
    width: Optional[int] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                header[key.strip()] = (value.strip(), lineno)
            continue

        fields = [f.strip() for f in line.split(",")]
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise IngestError(f"ragged row: expected {width} fields, found {len(fields)}", path=path, line=lineno)
        values: List[float] = []
        for f in fields:
            try:
                values.append(float(f))
            except ValueError:
                raise IngestError(f"non-numeric field {f!r}", path=path, line=lineno) from None
        rows.append(values)
        lines.append(lineno)

    if not rows:
        raise IngestError("no data rows", path=path, line=len(text.splitlines()) or 1)
    return header, np.array(rows, dtype=float), lines


def _header_float(header: Mapping[str, Tuple[str, int]], key: str, path: Path, first_data_line: int) -> float:
    if key not in header:
        raise IngestError(f"missing header key {key!r} before the data", path=path, line=first_data_line)
    value, lineno = header[key]
    try:
        return float(value)
    except ValueError:
        raise IngestError(f"header {key}={value!r} is not a number", path=path, line=lineno) from None


def read_image(path: PathLike, *, null_value: Optional[float] = None) -> BoreholeImage:
    """
    Reads an image file. Null pixels (the header's null_value, else ``null_value``, else
    -999.25) are replaced by the mean of the finite pixels in the same row.
    """
    p = Path(path)
    header, pixels, lines = _parse_table(p)
    depth_start = _header_float(header, "depth_start", p, lines[0])
    sample_interval = _header_float(header, "sample_interval", p, lines[0])
    if not sample_interval > 0:
        raise IngestError(
            f"sample_interval must be > 0 (got {sample_interval:g})", path=p, line=header["sample_interval"][1]
        )
    if "null_value" in header:
        sentinel = _header_float(header, "null_value", p, lines[0])
    else:
        sentinel = DEFAULT_NULL_VALUE if null_value is None else null_value

    try:
        pixels, repaired = repair_null_pixels(pixels, sentinel)
    except NullRowError as e:
        raise IngestError("all values in the row are null", path=p, line=lines[e.row]) from e
    if repaired:
        log.warning("Replaced %d null pixel(s) in %s by row means", repaired, p)

    return BoreholeImage(pixels, depth_start=depth_start, sample_interval=sample_interval)


def read_signal(path: PathLike, *, null_value: Optional[float] = None) -> Signal:
    image = read_image(path, null_value=null_value)
    if image.n_azimuth != 1:
        raise IngestError(f"expected a single column, found {image.n_azimuth}", path=path)
    return Signal(image.pixels[:, 0], depth_start=image.depth_start, sample_interval=image.sample_interval)


def write_table(
    path: PathLike,
    rows: np.ndarray,
    *,
    depth_start: float,
    sample_interval: float,
    columns: Optional[Sequence[str]] = None,
    extra: Optional[Mapping[str, Any]] = None,
) -> Path:
    p = Path(path)
    table = np.asarray(rows, dtype=float)
    if table.ndim == 1:
        table = table[:, None]
    out = [f"# depth_start={format_value(depth_start)}", f"# sample_interval={format_value(sample_interval)}"]
    if columns:
        out.append(f"# columns={','.join(columns)}")
    for key, value in (extra or {}).items():
        out.append(f"# {key}={value}")
    out.extend(",".join(format_value(v) for v in row) for row in table.tolist())
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text("\n".join(out) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(p, e.strerror or str(e)) from e
    log.info("Wrote %s", p)
    return p


def write_image(path: PathLike, image: BoreholeImage) -> Path:
    return write_table(path, image.pixels, depth_start=image.depth_start, sample_interval=image.sample_interval)


def write_signal(path: PathLike, signal: Signal, *, column: str = "value") -> Path:
    return write_table(
        path,
        signal.values,
        depth_start=signal.depth_start,
        sample_interval=signal.sample_interval,
        columns=[column],
    )


def write_curve(path: PathLike, curve: DepthShiftCurve, ref: Signal) -> Path:
    return write_table(
        path,
        np.column_stack([curve.depths, curve.shift_samples, curve.shift_ft]),
        depth_start=ref.depth_start,
        sample_interval=ref.sample_interval,
        columns=["depth", "shift_samples", "shift_ft"],
    )


def write_path(path: PathLike, warp_path: WarpPath, ref: Signal) -> Path:
    return write_table(
        path,
        warp_path.pairs,
        depth_start=ref.depth_start,
        sample_interval=ref.sample_interval,
        columns=["i", "j"],
    )


def write_truth(path: PathLike, truth: GroundTruthWarp, ref: Signal) -> Path:
    return write_table(
        path,
        truth.shift_samples,
        depth_start=ref.depth_start,
        sample_interval=ref.sample_interval,
        columns=["shift_samples"],
    )


def write_feature_matrix(path: PathLike, features: FeatureMatrix, signal: Signal, *, descriptor: str) -> Path:
    return write_table(
        path,
        features.rows,
        depth_start=signal.depth_start,
        sample_interval=signal.sample_interval,
        extra={"descriptor": descriptor, "feature_dim": features.feature_dim},
    )


def to_gray8(pixels: np.ndarray) -> np.ndarray:
    """Min-max scales to 0..255; a constant image maps to 0."""
    lo, hi = float(np.min(pixels)), float(np.max(pixels))
    if hi <= lo:
        return np.zeros(pixels.shape, dtype=np.uint8)
    scaled = (np.asarray(pixels, dtype=float) - lo) * (255.0 / (hi - lo))
    return np.clip(np.rint(scaled), 0, 255).astype(np.uint8)


def write_pgm(path: PathLike, pixels: np.ndarray) -> Path:
    """Binary (P5) 8-bit grayscale: width = columns, height = rows."""
    p = Path(path)
    img = to_gray8(np.atleast_2d(pixels))
    height, width = img.shape
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        with p.open("wb") as f:
            f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            f.write(np.ascontiguousarray(img).tobytes())
    except OSError as e:
        raise OutputError(p, e.strerror or str(e)) from e
    log.info("Wrote %s", p)
    return p


def write_json(path: PathLike, payload: Mapping[str, Any]) -> Path:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(p, e.strerror or str(e)) from e
    log.info("Wrote %s", p)
    return p


def run_summary(result: MatchResult, run_config: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    cfg = result.config
    return {
        "config": dict(run_config) if run_config is not None else None,
        "descriptor": cfg.descriptor.describe(),
        "samples_per_ft": cfg.samples_per_ft,
        "window_samples": cfg.window_samples(),
        "reference": {
            "depth_start": result.reference.depth_start,
            "sample_interval": result.reference.sample_interval,
            "shape": [result.reference.n_depth, result.reference.n_azimuth],
        },
        "target": {
            "depth_start": result.target.depth_start,
            "sample_interval": result.target.sample_interval,
            "shape": [result.target.n_depth, result.target.n_azimuth],
        },
        "windows": [asdict(w) for w in result.windows],
        "path_length": len(result.path),
        "join_repairs": result.path.repairs,
        "curve": result.curve.summary(),
    }


def write_outputs(
    result: MatchResult,
    out_dir: PathLike,
    *,
    run_config: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Path]:
    """Writes every artifact of a depth-matching run into ``out_dir``."""
    try:
        out = ensure_dir(out_dir)
    except OSError as e:
        raise OutputError(out_dir, e.strerror or str(e)) from e
    ref = result.reference_signal
    return {
        "aligned_image": write_image(out / "aligned_image.csv", result.aligned),
        "shift_curve": write_curve(out / "shift_curve.csv", result.curve, ref),
        "warp_path": write_path(out / "warp_path.csv", result.path, ref),
        "reduced_ref": write_signal(out / "reduced_ref.csv", ref),
        "reduced_target": write_signal(out / "reduced_target.csv", result.target_signal),
        "reference_pgm": write_pgm(out / "reference.pgm", result.reference.pixels),
        "target_pgm": write_pgm(out / "target.pgm", result.target.pixels),
        "aligned_pgm": write_pgm(out / "aligned.pgm", result.aligned.pixels),
        "summary": write_json(out / "summary.json", run_summary(result, run_config)),
    }
