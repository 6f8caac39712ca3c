"""Exception types shared across the toolkit."""


class UwbCfarError(Exception):
    """Base class for every error raised by this package.

    ``stage`` is filled in by :func:`uwbcfar.pipeline.detect` when the error
    comes out of one of its processing stages.
    """

    stage = None


class DimensionError(UwbCfarError, ValueError):
    pass


class InputError(UwbCfarError, ValueError):
    pass


class ParameterError(UwbCfarError, ValueError):
    pass


class ConfigurationError(UwbCfarError, ValueError):
    pass


class BoundsError(UwbCfarError, IndexError):
    pass


class FrameFormatError(UwbCfarError):
    """Bad magic, version, or payload length in a frame file."""


class BackendMismatchError(UwbCfarError, RuntimeError):
    """The naive and integral-image CFAR masks disagreed outside the tie band."""

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = list(cells)
