"""Timing harness for the two CFAR backends and the processing chain.

``bench_cfar`` times naive and integral-image CFAR over a grid of window
sizes on one seeded exponential power map.  ``bench_pipeline`` times each
processing step of :func:`uwbcfar.pipeline.detect`.  Both refuse to report a
row unless the two backends produced the same detections on its input.

Absolute times depend on the machine; only their ordering and ratios mean
anything across hosts.
"""

from __future__ import annotations

import csv
import io
import json
import platform
import statistics
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .cfar import INTEGRAL, NAIVE, CfarParams, cfar2d, mismatched_cells
from .errors import BackendMismatchError, ParameterError
from .pipeline import PipelineConfig, RadarFrame, fast_time_stage, slow_time_stage

__all__ = [
    "DEFAULT_GRID",
    "STEP_NAMES",
    "BenchSpec",
    "TimingStats",
    "CfarRow",
    "StepRow",
    "BenchReport",
    "bench_cfar",
    "bench_pipeline",
    "environment_note",
    "CFAR_COLUMNS",
    "PIPELINE_COLUMNS",
    "report_records",
    "to_csv",
    "to_json",
    "to_text",
    "records_from_csv",
    "records_from_json",
]

DEFAULT_GRID = ((4, 8), (4, 12), (8, 8), (8, 12))

FAST_TIME = "Signal Processing I, Fast Time"
SLOW_TIME = "Signal Processing II, Slow Time"
THRESHOLD_NAIVE = "Signal Threshold (CA-CFAR)"
THRESHOLD_II = "Signal Threshold (II CA-CFAR)"
TOTAL = "Total"
STEP_NAMES = (FAST_TIME, SLOW_TIME, THRESHOLD_NAIVE, THRESHOLD_II, TOTAL)

NOISY_CV = 0.25

CFAR_COLUMNS = ("guard", "background", "naive_mean_s", "naive_std_s", "ii_mean_s", "ii_std_s", "ratio")
PIPELINE_COLUMNS = ("step", "naive_mean_s", "naive_std_s", "ii_mean_s", "ii_std_s")

SAT_FOOTER = "II CA-CFAR timings include building the summed-area table."


@dataclass(frozen=True)
class BenchSpec:
    map_rows: int = 1024
    map_cols: int = 600
    param_grid: tuple = DEFAULT_GRID
    pfa: float = 1e-3
    repetitions: int = 10
    warmup: int = 2

    def __post_init__(self):
        if self.repetitions < 3:
            raise ParameterError(f"repetitions must be at least 3, got {self.repetitions}")
        if self.warmup < 0:
            raise ParameterError(f"warmup must be non-negative, got {self.warmup}")
        if not self.param_grid:
            raise ParameterError("param_grid is empty")
        if self.map_rows < 1 or self.map_cols < 1:
            raise ParameterError(f"map must be non-empty, got {self.map_rows}x{self.map_cols}")
        object.__setattr__(self, "param_grid", tuple(tuple(int(v) for v in p) for p in self.param_grid))


@dataclass(frozen=True)
class TimingStats:
    """Summary of repeated wall-clock measurements, in seconds."""

    mean: float
    std: float
    median: float
    samples: tuple = field(repr=False)

    @classmethod
    def of(cls, samples) -> "TimingStats":
        samples = tuple(float(s) for s in samples)
        return cls(statistics.fmean(samples), statistics.stdev(samples), statistics.median(samples), samples)

    @property
    def noisy(self) -> bool:
        return self.std > NOISY_CV * self.mean


@dataclass(frozen=True)
class CfarRow:
    guard: int
    background: int
    naive: TimingStats
    ii: TimingStats

    @property
    def ratio(self) -> float:
        return self.naive.mean / self.ii.mean

    @property
    def n_train(self) -> int:
        return CfarParams(self.guard, self.background).n_train_interior


@dataclass(frozen=True)
class StepRow:
    """One step of the chain; ``None`` marks a backend the step does not apply to."""

    step: str
    naive: TimingStats | None
    ii: TimingStats | None


@dataclass
class BenchReport:
    cfar_rows: list = field(default_factory=list)
    step_rows: list = field(default_factory=list)
    environment: str = ""
    notes: list = field(default_factory=list)

    def step(self, name: str) -> StepRow:
        for row in self.step_rows:
            if row.step == name:
                return row
        raise KeyError(name)


def environment_note(threads: int = 1) -> str:
    cpu = platform.processor() or platform.machine()
    return (
        f"{platform.system()} {platform.release()}, {cpu}, Python {platform.python_version()}, "
        f"numpy {np.__version__}, numba {numba.__version__}, threads={threads}"
    )


def _timed(func, *args, **kwargs):
    start = time.perf_counter()
    out = func(*args, **kwargs)
    return time.perf_counter() - start, out


def _gate(power_map, naive_result, ii_result, where: str):
    bad = mismatched_cells(power_map, naive_result, ii_result)
    if bad:
        shown = ", ".join(f"({r}, {c})" for r, c in bad[:10])
        raise BackendMismatchError(
            f"{where}: naive and II CA-CFAR disagree at {len(bad)} cell(s): {shown}", bad
        )


def bench_cfar(spec: BenchSpec | None = None, seed: int = 0, *, threads: int = 1) -> BenchReport:
    """Time both CFAR backends for every window size in ``spec.param_grid``.

    Every row uses the same seeded exponential map.  Map generation is not
    timed; summed-area table construction is, as part of the II backend.

    Raises
    ------
    BackendMismatchError
        If the backends' masks differ outside the tie band for any row.
    """
    spec = spec or BenchSpec()
    power_map = np.random.default_rng(seed).exponential(1.0, size=(spec.map_rows, spec.map_cols))
    grid = [CfarParams(g, b, spec.pfa) for g, b in spec.param_grid]
    for params in grid:
        naive_result = cfar2d(power_map, params, NAIVE, threads=threads)
        ii_result = cfar2d(power_map, params, INTEGRAL, threads=threads)
        _gate(power_map, naive_result, ii_result,
              f"guard={params.guard_radius}, background={params.background_radius}")
    for _ in range(spec.warmup):
        for params in grid:
            cfar2d(power_map, params, NAIVE, threads=threads)
            cfar2d(power_map, params, INTEGRAL, threads=threads)
    # round-robin over the grid so slow spells on the host hit every row alike
    naive_times = [[] for _ in grid]
    ii_times = [[] for _ in grid]
    for _ in range(spec.repetitions):
        for k, params in enumerate(grid):
            naive_times[k].append(_timed(cfar2d, power_map, params, NAIVE, threads=threads)[0])
            ii_times[k].append(_timed(cfar2d, power_map, params, INTEGRAL, threads=threads)[0])
    report = BenchReport(environment=environment_note(threads), notes=[SAT_FOOTER])
    for params, naive, ii in zip(grid, naive_times, ii_times):
        report.cfar_rows.append(
            CfarRow(params.guard_radius, params.background_radius, TimingStats.of(naive), TimingStats.of(ii))
        )
    return report


def bench_pipeline(
    frame: RadarFrame,
    config: PipelineConfig | None = None,
    repetitions: int = 10,
    warmup: int = 2,
    *,
    threads: int = 1,
) -> BenchReport:
    """Time each processing step of the chain on ``frame``.

    Each repetition runs the fast-time and slow-time steps once and then
    thresholds the same band map with both backends, so the two totals share
    their processing-step timings and differ only by the threshold step.
    """
    if repetitions < 3:
        raise ParameterError(f"repetitions must be at least 3, got {repetitions}")
    config = config or PipelineConfig()
    frame = frame.validated()

    def one_pass():
        t_fast, fast = _timed(fast_time_stage, frame)
        t_slow, band = _timed(slow_time_stage, fast, config)
        t_naive, naive_result = _timed(cfar2d, band.power, config.cfar, NAIVE, threads=threads)
        t_ii, ii_result = _timed(cfar2d, band.power, config.cfar, INTEGRAL, threads=threads)
        return (t_fast, t_slow, t_naive, t_ii), band, naive_result, ii_result

    _, band, naive_result, ii_result = one_pass()
    _gate(band.power, naive_result, ii_result, "pipeline threshold")
    for _ in range(warmup):
        one_pass()
    runs = np.array([one_pass()[0] for _ in range(repetitions)])
    fast = TimingStats.of(runs[:, 0])
    slow = TimingStats.of(runs[:, 1])
    thr_naive = TimingStats.of(runs[:, 2])
    thr_ii = TimingStats.of(runs[:, 3])
    total_naive = TimingStats.of(runs[:, 0] + runs[:, 1] + runs[:, 2])
    total_ii = TimingStats.of(runs[:, 0] + runs[:, 1] + runs[:, 3])
    rows = [
        StepRow(FAST_TIME, fast, fast),
        StepRow(SLOW_TIME, slow, slow),
        StepRow(THRESHOLD_NAIVE, thr_naive, None),
        StepRow(THRESHOLD_II, None, thr_ii),
        StepRow(TOTAL, total_naive, total_ii),
    ]
    notes = [SAT_FOOTER, "Signal Recording is not measured (no radar hardware)."]
    return BenchReport(step_rows=rows, environment=environment_note(threads), notes=notes)


# serialization

def report_records(report: BenchReport, mode: str) -> list:
    """Flat per-row dicts shared by the CSV and JSON forms."""
    if mode == "cfar":
        return [
            {
                "guard": row.guard,
                "background": row.background,
                "naive_mean_s": row.naive.mean,
                "naive_std_s": row.naive.std,
                "ii_mean_s": row.ii.mean,
                "ii_std_s": row.ii.std,
                "ratio": row.ratio,
            }
            for row in report.cfar_rows
        ]
    if mode == "pipeline":
        records = []
        for row in report.step_rows:
            records.append(
                {
                    "step": row.step,
                    "naive_mean_s": row.naive.mean if row.naive else None,
                    "naive_std_s": row.naive.std if row.naive else None,
                    "ii_mean_s": row.ii.mean if row.ii else None,
                    "ii_std_s": row.ii.std if row.ii else None,
                }
            )
        return records
    raise ParameterError(f"unknown report mode {mode!r}")


def _columns(mode):
    return CFAR_COLUMNS if mode == "cfar" else PIPELINE_COLUMNS


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest repr parses back to the same double
    return value


def to_csv(report: BenchReport, mode: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_columns(mode))
    for record in report_records(report, mode):
        writer.writerow([_csv_cell(record[k]) for k in _columns(mode)])
    return buf.getvalue()


def records_from_csv(text: str, mode: str) -> list:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        record = {}
        for key in _columns(mode):
            value = row[key]
            if key in ("guard", "background"):
                record[key] = int(value)
            elif key == "step":
                record[key] = value
            else:
                record[key] = None if value == "" else float(value)
        out.append(record)
    return out


def to_json(report: BenchReport, mode: str) -> str:
    payload = {
        "mode": mode,
        "environment": report.environment,
        "notes": list(report.notes),
        "rows": report_records(report, mode),
    }
    return json.dumps(payload, indent=2) + "\n"


def records_from_json(text: str) -> list:
    return json.loads(text)["rows"]


def _pm(stats):
    if stats is None:
        return ""
    flag = " (noisy)" if stats.noisy else ""
    return f"{stats.mean:.4f}±{stats.std:.4f}{flag}"


def to_text(report: BenchReport, mode: str) -> str:
    lines = []
    if mode == "cfar":
        header = f"{'Guard':>5} {'Background':>10} {'N train':>7}  {'CA-CFAR (s)':>22}  {'II CA-CFAR (s)':>22}  {'Ratio':>8}"
        lines += [header, "-" * len(header)]
        for row in report.cfar_rows:
            lines.append(
                f"{row.guard:>5} {row.background:>10} {row.n_train:>7}  {_pm(row.naive):>22}  "
                f"{_pm(row.ii):>22}  {row.ratio:>6.1f}:1"
            )
        lines.append("")
        lines.append("medians (s): " + ", ".join(
            f"{r.guard}/{r.background}: {r.naive.median:.4f} vs {r.ii.median:.4f}" for r in report.cfar_rows
        ))
    elif mode == "pipeline":
        header = f"{'Signal Processing Step':<32} {'CA-CFAR (s)':>22} {'II CA-CFAR (s)':>22}"
        lines += [header, "-" * len(header)]
        for row in report.step_rows:
            lines.append(f"{row.step:<32} {_pm(row.naive):>22} {_pm(row.ii):>22}")
    else:
        raise ParameterError(f"unknown report mode {mode!r}")
    lines.append("")
    lines.extend(f"note: {n}" for n in report.notes)
    lines.append(f"environment: {report.environment}")
    return "\n".join(lines) + "\n"
