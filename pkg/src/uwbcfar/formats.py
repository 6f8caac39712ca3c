"""File formats: binary radar frames, run configs, detection CSVs, heatmaps.

Frame file layout (little-endian)::

    offset  size  field
    0       4     magic b"RFRM"
    4       2     format version (uint16, 1)
    6       4     m_samples (uint32)
    10      4     n_traces (uint32)
    14      8     fast_rate in Hz (float64)
    22      8     prf in Hz (float64)
    30      ...   n_traces traces, each m_samples float32 values

Samples are stored as float32 and read back as float64, so a frame whose
values are float32-representable round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bench import BenchSpec
from .cfar import CfarParams
from .errors import ConfigurationError, FrameFormatError, UwbCfarError
from .pipeline import PipelineConfig, RadarFrame, RangeFrequencyMap
from .synth import SceneConfig

__all__ = [
    "FRAME_MAGIC",
    "FRAME_VERSION",
    "HEADER_SIZE",
    "frame_to_bytes",
    "frame_from_bytes",
    "write_frame",
    "read_frame",
    "RunConfig",
    "parse_run_config",
    "load_run_config",
    "DETECTION_COLUMNS",
    "detections_csv",
    "heatmap_pgm",
]

FRAME_MAGIC = b"RFRM"
FRAME_VERSION = 1
_HEADER = struct.Struct("<4sHIIdd")
HEADER_SIZE = _HEADER.size


def frame_to_bytes(frame: RadarFrame) -> bytes:
    data = np.asarray(frame.data)
    m, n = data.shape
    header = _HEADER.pack(FRAME_MAGIC, FRAME_VERSION, m, n, float(frame.fast_rate), float(frame.prf))
    # trace-major: transpose so each trace's samples are contiguous
    payload = np.ascontiguousarray(data.T, dtype="<f4").tobytes()
    return header + payload


def frame_from_bytes(blob: bytes) -> RadarFrame:
    if len(blob) < HEADER_SIZE:
        raise FrameFormatError(f"file is {len(blob)} bytes, shorter than the {HEADER_SIZE}-byte header")
    magic, version, m, n, fast_rate, prf = _HEADER.unpack_from(blob)
    if magic != FRAME_MAGIC:
        raise FrameFormatError(f"bad magic {magic!r}, expected {FRAME_MAGIC!r}")
    if version != FRAME_VERSION:
        raise FrameFormatError(f"unsupported frame format version {version}")
    expected = m * n * 4
    if len(blob) - HEADER_SIZE != expected:
        raise FrameFormatError(
            f"payload is {len(blob) - HEADER_SIZE} bytes, expected {expected} for {m}x{n} float32 samples"
        )
    traces = np.frombuffer(blob, dtype="<f4", count=m * n, offset=HEADER_SIZE).reshape(n, m)
    return RadarFrame(traces.T.astype(np.float64), fast_rate, prf)


def write_frame(path, frame: RadarFrame) -> None:
    Path(path).write_bytes(frame_to_bytes(frame))


def read_frame(path) -> RadarFrame:
    return frame_from_bytes(Path(path).read_bytes())


# run config files

@dataclass(frozen=True)
class RunConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    scene: SceneConfig = field(default_factory=SceneConfig)
    bench: BenchSpec = field(default_factory=BenchSpec)


def _parse_bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_fft_length(text):
    return None if text.lower() == "auto" else int(text)


def _parse_grid(text):
    # "4/8, 4/12, 8/8, 8/12"
    grid = []
    for item in text.split(","):
        guard, sep, background = item.strip().partition("/")
        if not sep:
            raise ValueError(f"grid entries look like guard/background, got {item.strip()!r}")
        grid.append((int(guard), int(background)))
    return tuple(grid)


# key -> (section, field, parser); "cfar" fields live inside PipelineConfig.cfar
_KEYS = {
    "mean_filter_window": ("pipeline", "mean_filter_window", int),
    "fft_length": ("pipeline", "fft_length", _parse_fft_length),
    "band_low_hz": ("pipeline", "band_low_hz", float),
    "band_high_hz": ("pipeline", "band_high_hz", float),
    "backend": ("pipeline", "backend", str),
    "normalization_epsilon": ("pipeline", "normalization_epsilon", float),
    "clutter_subtraction": ("pipeline", "clutter_subtraction", _parse_bool),
    "guard_radius": ("cfar", "guard_radius", int),
    "background_radius": ("cfar", "background_radius", int),
    "pfa": ("cfar", "pfa", float),
    "border_policy": ("cfar", "border_policy", str),
    "tie_policy": ("cfar", "tie_policy", str),
    "map_rows": ("bench", "map_rows", int),
    "map_cols": ("bench", "map_cols", int),
    "param_grid": ("bench", "param_grid", _parse_grid),
    "repetitions": ("bench", "repetitions", int),
    "warmup": ("bench", "warmup", int),
}
_KEYS.update(
    {f.name: ("scene", f.name, int if f.type == "int" else float) for f in dataclasses.fields(SceneConfig)}
)

def _build(values: dict) -> RunConfig:
    cfar = CfarParams(**values.get("cfar", {}))
    bench_values = dict(values.get("bench", {}))
    bench_values.setdefault("pfa", cfar.pfa)
    return RunConfig(
        pipeline=PipelineConfig(cfar=cfar, **values.get("pipeline", {})),
        scene=SceneConfig(**values.get("scene", {})),
        bench=BenchSpec(**bench_values),
    )


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse ``key = value`` lines into pipeline, scene and bench settings.

    ``#`` starts a comment.  ``pfa`` sets both the detector and the benchmark
    false-alarm probability.  Any problem raises :class:`ConfigurationError`
    naming the offending line.
    """
    values: dict = {}
    seen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        where = f"{source}, line {lineno}"
        if not sep or not key:
            raise ConfigurationError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        if key not in _KEYS:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
        if key in seen:
            raise ConfigurationError(f"{where}: {key!r} already set on line {seen[key]}")
        section, name, parser = _KEYS[key]
        try:
            parsed = parser(value)
        except ValueError as err:
            raise ConfigurationError(f"{where}: bad value for {key!r}: {err}") from None
        # domain check of this key alone, against defaults for the rest
        try:
            _build({section: {name: parsed}})
        except (UwbCfarError, TypeError, ValueError) as err:
            raise ConfigurationError(f"{where}: bad value for {key!r}: {err}") from None
        values.setdefault(section, {})[name] = parsed
        seen[key] = lineno
    try:
        return _build(values)
    except (UwbCfarError, TypeError, ValueError) as err:
        last = max(seen.values()) if seen else 0
        raise ConfigurationError(f"{source}, line {last}: inconsistent settings: {err}") from None


def load_run_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigurationError(f"cannot read config {path}: {err.strerror}") from None
    return parse_run_config(text, str(path))


# result outputs

DETECTION_COLUMNS = ("row", "col", "range_m", "freq_hz", "power", "threshold")


def detections_csv(band: RangeFrequencyMap, detections) -> str:
    """Detection table sorted as given (descending power)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DETECTION_COLUMNS)
    for d in detections:
        writer.writerow(
            [
                d.row,
                d.col,
                f"{band.range_axis[d.row]:.9g}",
                f"{band.freq_axis[d.col]:.9g}",
                f"{d.value:.9g}",
                f"{d.threshold:.9g}",
            ]
        )
    return buf.getvalue()


def heatmap_pgm(power: np.ndarray) -> bytes:
    """8-bit binary PGM (P5): one pixel row per range bin, scaled by the map max."""
    power = np.asarray(power, dtype=np.float64)
    peak = power.max() if power.size else 0.0
    if peak > 0:
        pixels = np.rint(power / peak * 255.0).astype(np.uint8)
    else:
        pixels = np.zeros(power.shape, dtype=np.uint8)
    rows, cols = pixels.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + pixels.tobytes()
