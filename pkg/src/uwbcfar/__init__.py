"""Respiration detection for UWB impulse radar with integral-image CA-CFAR."""

from .cfar import (
    CfarParams,
    Detection,
    DetectionResult,
    alpha_factor,
    cfar2d,
    cfar2d_integral,
    cfar2d_naive,
    mismatched_cells,
    training_window,
)
from .errors import (
    BackendMismatchError,
    BoundsError,
    ConfigurationError,
    DimensionError,
    FrameFormatError,
    InputError,
    ParameterError,
    UwbCfarError,
)
from .pipeline import PipelineConfig, RadarFrame, RangeFrequencyMap, detect
from .sat import SummedAreaTable, build_sat, region_sum
from .synth import GroundTruth, SceneConfig, generate_scene, monocycle_pulse

__version__ = "0.1.0"
