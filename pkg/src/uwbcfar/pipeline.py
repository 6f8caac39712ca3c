"""Raw radar frame to respiration-band range-frequency map and detections.

Stages, in order:

1. fast time: per-trace DC removal, then per-trace linear detrend;
2. slow time: centered moving average per range bin, per-bin max
   normalization, zero-padded FFT power spectrum, respiration band selection;
3. 2-D CA-CFAR on the band power map.

A static echo stays constant along slow time, so without zero padding it only
feeds the DC bin.  Zero padding spreads it into weak sidelobes (under 1% of
the DC power inside the respiration band); ``clutter_subtraction`` removes it
before the FFT.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .cfar import BACKENDS, INTEGRAL, CfarParams, DetectionResult, cfar2d
from .errors import ConfigurationError, InputError, ParameterError, UwbCfarError

__all__ = [
    "SPEED_OF_LIGHT",
    "RadarFrame",
    "RangeFrequencyMap",
    "PipelineConfig",
    "remove_dc",
    "detrend_linear",
    "subtract_clutter",
    "mean_filter_slow",
    "normalize_slow",
    "slow_time_spectrum",
    "band_select",
    "fast_time_stage",
    "slow_time_stage",
    "threshold_stage",
    "detect",
]

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class RadarFrame:
    """One observation: ``data[m, n]`` is fast-time sample ``m`` of trace ``n``.

    ``fast_rate`` is the fast-time sampling rate and ``prf`` the trace rate,
    both in Hz.
    """

    data: np.ndarray
    fast_rate: float = 39e9
    prf: float = 68.6

    @property
    def m_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_traces(self) -> int:
        return self.data.shape[1]

    def validated(self) -> "RadarFrame":
        """Return a float64 copy-free view of this frame after checking it.

        Raises :class:`InputError` on a bad shape, non-finite samples or
        non-positive rates.
        """
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] < 2:
            raise InputError(f"frame must be at least 2x2, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InputError("frame contains non-finite samples")
        if not (self.fast_rate > 0 and self.prf > 0):
            raise InputError(f"rates must be positive, got fast_rate={self.fast_rate}, prf={self.prf}")
        if data is self.data:
            return self
        return RadarFrame(data, float(self.fast_rate), float(self.prf))

    def with_data(self, data: np.ndarray) -> "RadarFrame":
        return RadarFrame(data, self.fast_rate, self.prf)

    def range_axis(self) -> np.ndarray:
        """Range in meters of each fast-time sample (two-way delay halved)."""
        return np.arange(self.m_samples) * SPEED_OF_LIGHT / (2.0 * self.fast_rate)


@dataclass(frozen=True)
class RangeFrequencyMap:
    """Power per (range bin, slow-time frequency bin)."""

    power: np.ndarray
    freq_axis: np.ndarray
    range_axis: np.ndarray

    @property
    def bin_width_hz(self) -> float:
        if len(self.freq_axis) < 2:
            return float("nan")
        return float(self.freq_axis[1] - self.freq_axis[0])


@dataclass(frozen=True)
class PipelineConfig:
    mean_filter_window: int = 5
    fft_length: int | None = None  # None: next power of two >= n_traces
    band_low_hz: float = 0.3
    band_high_hz: float = 0.8
    cfar: CfarParams = field(default_factory=CfarParams)
    backend: str = INTEGRAL
    normalization_epsilon: float = 1e-12
    clutter_subtraction: bool = False

    def __post_init__(self):
        w = self.mean_filter_window
        if int(w) != w or w < 1 or w % 2 == 0:
            raise ParameterError(f"mean_filter_window must be a positive odd integer, got {w!r}")
        if self.fft_length is not None and self.fft_length < 1:
            raise ParameterError(f"fft_length must be positive, got {self.fft_length!r}")
        if not 0 < self.band_low_hz < self.band_high_hz:
            raise ParameterError(
                f"band must satisfy 0 < low < high, got [{self.band_low_hz}, {self.band_high_hz}]"
            )
        if self.backend not in BACKENDS:
            raise ParameterError(f"unknown backend {self.backend!r}; choose one of {BACKENDS}")
        if not self.normalization_epsilon > 0:
            raise ParameterError("normalization_epsilon must be positive")

    def resolved_fft_length(self, n_traces: int) -> int:
        if self.fft_length is not None:
            return self.fft_length
        return 1 << (int(n_traces) - 1).bit_length()

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)


def remove_dc(frame: RadarFrame) -> RadarFrame:
    """Subtract each trace's mean over fast time."""
    x = frame.data
    return frame.with_data(x - x.mean(axis=0, keepdims=True))


def detrend_linear(frame: RadarFrame) -> RadarFrame:
    """Subtract each trace's least-squares line over the fast-time sample index."""
    x = frame.data
    m = x.shape[0]
    # orthonormal basis of span{1, m}: fitting reduces to two projections
    ones = np.full(m, 1.0 / np.sqrt(m))
    ramp = np.arange(m, dtype=np.float64) - (m - 1) / 2.0
    ramp /= np.linalg.norm(ramp)
    fit = np.outer(ones, ones @ x) + np.outer(ramp, ramp @ x)
    return frame.with_data(x - fit)


def subtract_clutter(frame: RadarFrame) -> RadarFrame:
    """Remove each range bin's slow-time mean (static clutter)."""
    x = frame.data
    return frame.with_data(x - x.mean(axis=1, keepdims=True))


def mean_filter_slow(frame: RadarFrame, window: int) -> RadarFrame:
    """Centered moving average along slow time, per range bin.

    Near either end the window shrinks symmetrically to the samples that
    exist, so trace ``n`` averages ``2*h + 1`` samples with
    ``h = min(window // 2, n, N - 1 - n)``.
    """
    n = frame.n_traces
    if int(window) != window or window < 1 or window % 2 == 0 or window > n:
        raise ParameterError(f"window must be odd and within 1..{n}, got {window!r}")
    if window == 1:
        return frame.with_data(frame.data.copy())
    x = frame.data
    prefix = np.zeros((x.shape[0], n + 1))
    np.cumsum(x, axis=1, out=prefix[:, 1:])
    idx = np.arange(n)
    half = np.minimum(window // 2, np.minimum(idx, n - 1 - idx))
    lo = idx - half
    hi = idx + half + 1
    return frame.with_data((prefix[:, hi] - prefix[:, lo]) / (hi - lo))


def normalize_slow(frame: RadarFrame, epsilon: float = 1e-12) -> RadarFrame:
    """Divide each range bin by ``max(max |row|, epsilon)``."""
    x = frame.data
    scale = np.maximum(np.abs(x).max(axis=1, keepdims=True), epsilon)
    return frame.with_data(x / scale)


def slow_time_spectrum(frame: RadarFrame, fft_length: int) -> RangeFrequencyMap:
    """Power of the zero-padded slow-time DFT, non-negative frequencies only.

    Bin ``k`` sits at ``k * prf / fft_length`` Hz; the result has
    ``fft_length // 2 + 1`` bins including DC.
    """
    if fft_length < frame.n_traces:
        raise ParameterError(f"fft_length {fft_length} is shorter than {frame.n_traces} traces")
    spectrum = np.fft.rfft(frame.data, n=fft_length, axis=1)
    power = spectrum.real**2 + spectrum.imag**2
    freq = np.arange(power.shape[1]) * frame.prf / fft_length
    return RangeFrequencyMap(power, freq, frame.range_axis())


def band_select(spectrum: RangeFrequencyMap, band_low_hz: float, band_high_hz: float) -> RangeFrequencyMap:
    """Keep the bins whose frequency lies in ``[band_low_hz, band_high_hz]``."""
    if not 0 <= band_low_hz < band_high_hz:
        raise ConfigurationError(f"invalid band [{band_low_hz}, {band_high_hz}] Hz")
    f = spectrum.freq_axis
    keep = (f >= band_low_hz) & (f <= band_high_hz)
    if not keep.any():
        raise ConfigurationError(
            f"no frequency bin falls in [{band_low_hz}, {band_high_hz}] Hz "
            f"(bin width {spectrum.bin_width_hz:.4g} Hz, axis up to {f[-1]:.4g} Hz)"
        )
    return RangeFrequencyMap(spectrum.power[:, keep], f[keep], spectrum.range_axis)


def fast_time_stage(frame: RadarFrame) -> RadarFrame:
    return detrend_linear(remove_dc(frame))


def slow_time_stage(frame: RadarFrame, config: PipelineConfig) -> RangeFrequencyMap:
    if not config.band_high_hz < frame.prf / 2:
        raise ConfigurationError(
            f"band upper edge {config.band_high_hz} Hz is not below Nyquist ({frame.prf / 2} Hz)"
        )
    if config.clutter_subtraction:
        frame = subtract_clutter(frame)
    frame = mean_filter_slow(frame, config.mean_filter_window)
    frame = normalize_slow(frame, config.normalization_epsilon)
    spectrum = slow_time_spectrum(frame, config.resolved_fft_length(frame.n_traces))
    return band_select(spectrum, config.band_low_hz, config.band_high_hz)


def threshold_stage(band: RangeFrequencyMap, config: PipelineConfig, backend: str | None = None) -> DetectionResult:
    return cfar2d(band.power, config.cfar, backend or config.backend)


def _staged(name, func, *args):
    try:
        return func(*args)
    except UwbCfarError as err:
        err.stage = name
        err.args = (f"[{name}] {err.args[0] if err.args else ''}",) + err.args[1:]
        raise


def detect(frame: RadarFrame, config: PipelineConfig | None = None):
    """Run the whole chain on one frame.

    Returns ``(band_map, result)``.  Errors raised inside a stage carry the
    stage name in ``err.stage`` and in their message.
    """
    config = config or PipelineConfig()
    frame = _staged("validation", frame.validated)
    fast = _staged("fast time", fast_time_stage, frame)
    band = _staged("slow time", slow_time_stage, fast, config)
    result = _staged("threshold", threshold_stage, band, config)
    return band, result
