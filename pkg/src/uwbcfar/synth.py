"""Synthetic UWB impulse-radar scenes with a breathing target behind a wall.

Every trace holds a static wall echo, a target echo whose round-trip delay
swings sinusoidally with the chest displacement, and white Gaussian noise.
Echoes are the continuous monocycle evaluated at each sample instant, so
sub-sample delay changes survive sampling.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

from .errors import ConfigurationError, ParameterError
from .pipeline import SPEED_OF_LIGHT, RadarFrame

__all__ = [
    "SceneConfig",
    "GroundTruth",
    "monocycle_pulse",
    "monocycle_sigma",
    "target_delays",
    "generate_scene",
]

# pulse is treated as zero beyond this many sigmas when checking the window
_SUPPORT_SIGMAS = 6.0


@dataclass(frozen=True)
class SceneConfig:
    m_samples: int = 1024
    n_traces: int = 600
    fast_rate: float = 39e9
    prf: float = 68.6  # 600 traces over the 8.74 s recording
    target_range_m: float = 1.5
    resp_freq_hz: float = 0.3
    resp_displacement_m: float = 0.01
    wall_range_m: float = 0.8
    wall_amplitude: float = 10.0
    target_amplitude: float = 1.0
    target_attenuation: float = 0.3
    noise_sigma: float = 0.1
    pulse_center_hz: float = 3.75e9
    pulse_bandwidth_hz: float = 4.5e9
    seed: int = 0

    def replace(self, **changes) -> "SceneConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class GroundTruth:
    target_bin: int
    resp_freq_hz: float
    target_range_m: float
    wall_bin: int


def monocycle_sigma(center_hz: float, bandwidth_hz: float) -> float:
    """Gaussian width of the monocycle whose -10 dB band best fits the request.

    The first-derivative Gaussian has amplitude spectrum
    ``f * exp(-2 pi^2 sigma^2 f^2)``; its -10 dB edges are fixed multiples
    ``u_lo, u_hi`` of the peak frequency.  The peak frequency is the
    least-squares fit of ``(u_lo, u_hi) * f_peak`` to
    ``center -/+ bandwidth / 2``.
    """
    if not bandwidth_hz > 0:
        raise ParameterError(f"pulse bandwidth must be positive, got {bandwidth_hz!r}")
    if not center_hz > 0:
        raise ParameterError(f"pulse center frequency must be positive, got {center_hz!r}")
    # (u exp((1 - u^2)/2))^2 = 0.1 with v = u^2 gives v exp(-v) = 0.1 / e
    z = -0.1 / math.e
    u_lo = math.sqrt(-lambertw(z, 0).real)
    u_hi = math.sqrt(-lambertw(z, -1).real)
    lo = center_hz - bandwidth_hz / 2
    hi = center_hz + bandwidth_hz / 2
    f_peak = (lo * u_lo + hi * u_hi) / (u_lo**2 + u_hi**2)
    return 1.0 / (2.0 * math.pi * f_peak)


def monocycle_pulse(t, center_hz: float = 3.75e9, bandwidth_hz: float = 4.5e9):
    """Unit-peak Gaussian first-derivative pulse evaluated at times ``t`` (s)."""
    sigma = monocycle_sigma(center_hz, bandwidth_hz)
    u = np.asarray(t, dtype=np.float64) / sigma
    return -u * np.exp(0.5 - 0.5 * u * u)


def _check(config: SceneConfig, sigma: float):
    positive = ("m_samples", "n_traces", "fast_rate", "prf", "target_range_m", "resp_freq_hz", "wall_range_m")
    for name in positive:
        if not getattr(config, name) > 0:
            raise ConfigurationError(f"{name} must be positive, got {getattr(config, name)!r}")
    if config.resp_displacement_m < 0 or config.noise_sigma < 0:
        raise ConfigurationError("resp_displacement_m and noise_sigma must be non-negative")
    if not config.resp_freq_hz < config.prf / 2:
        raise ConfigurationError(
            f"respiration frequency {config.resp_freq_hz} Hz is not below Nyquist ({config.prf / 2} Hz)"
        )
    window = config.m_samples / config.fast_rate
    margin = _SUPPORT_SIGMAS * sigma
    extremes = {
        "wall": (config.wall_range_m, config.wall_range_m),
        "target": (
            config.target_range_m - config.resp_displacement_m,
            config.target_range_m + config.resp_displacement_m,
        ),
    }
    for name, (near, far) in extremes.items():
        first = 2 * near / SPEED_OF_LIGHT - margin
        last = 2 * far / SPEED_OF_LIGHT + margin
        if first < 0 or last > window:
            raise ConfigurationError(
                f"{name} echo spans {first * 1e9:.3f}..{last * 1e9:.3f} ns, outside the "
                f"{window * 1e9:.3f} ns fast-time window"
            )


def target_delays(config: SceneConfig) -> np.ndarray:
    """Round-trip target delay (s) of every trace."""
    slow_t = np.arange(config.n_traces) / config.prf
    sway = config.resp_displacement_m * np.sin(2 * np.pi * config.resp_freq_hz * slow_t)
    return 2.0 * (config.target_range_m + sway) / SPEED_OF_LIGHT


def generate_scene(config: SceneConfig | None = None):
    """Build one frame and its ground truth.

    Returns ``(frame, truth)``.  The same config (seed included) always gives
    a bit-identical frame.
    """
    config = config or SceneConfig()
    sigma = monocycle_sigma(config.pulse_center_hz, config.pulse_bandwidth_hz)
    _check(config, sigma)

    fast_t = np.arange(config.m_samples)[:, None] / config.fast_rate
    wall_delay = 2.0 * config.wall_range_m / SPEED_OF_LIGHT
    wall = config.wall_amplitude * monocycle_pulse(
        fast_t - wall_delay, config.pulse_center_hz, config.pulse_bandwidth_hz
    )
    target = (config.target_amplitude * config.target_attenuation) * monocycle_pulse(
        fast_t - target_delays(config)[None, :], config.pulse_center_hz, config.pulse_bandwidth_hz
    )
    data = target + wall  # wall broadcasts across traces
    if config.noise_sigma > 0:
        rng = np.random.default_rng(config.seed)
        data += config.noise_sigma * rng.standard_normal(data.shape)

    def to_bin(range_m):
        return int(round(2.0 * range_m / SPEED_OF_LIGHT * config.fast_rate))

    truth = GroundTruth(
        target_bin=to_bin(config.target_range_m),
        resp_freq_hz=config.resp_freq_hz,
        target_range_m=config.target_range_m,
        wall_bin=to_bin(config.wall_range_m),
    )
    return RadarFrame(data, config.fast_rate, config.prf), truth
