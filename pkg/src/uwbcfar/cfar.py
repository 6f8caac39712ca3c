"""Two-dimensional cell-averaging CFAR on a power map.

Two backends share one detection rule.  ``cfar2d_naive`` sums every training
cell of every window with explicit loops, so its cost per cell grows with the
window area.  ``cfar2d_integral`` builds one summed-area table and gets each
training sum from eight table reads (outer square minus guard square).

Windows are squares of radius ``guard_radius + background_radius`` around the
cell under test.  Near the map edges both squares are clamped to the map, the
training count shrinks accordingly and the scaling factor is re-evaluated for
that count, so every cell keeps the same design false-alarm probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .errors import ConfigurationError, InputError, ParameterError
from .sat import _sat_table

__all__ = [
    "CfarParams",
    "Detection",
    "DetectionResult",
    "alpha_factor",
    "training_window",
    "cfar2d",
    "cfar2d_naive",
    "cfar2d_integral",
    "mismatched_cells",
    "BACKENDS",
]

CLAMP = "clamp"
TIE_IS_ABSENT = "tie_is_absent"

NAIVE = "naive"
INTEGRAL = "ii"
BACKENDS = (NAIVE, INTEGRAL)

# |CUT - T| <= TIE_BAND * max(1, T) is where the two backends may legitimately
# disagree because their training sums round differently.
TIE_BAND = 1e-9


@dataclass(frozen=True)
class CfarParams:
    """Window geometry and false-alarm design point.

    ``guard_radius`` and ``background_radius`` are cells per side, in both map
    dimensions.  An interior cell is trained on
    ``(2*(g+b)+1)**2 - (2*g+1)**2`` cells.
    """

    guard_radius: int = 4
    background_radius: int = 8
    pfa: float = 1e-3
    border_policy: str = CLAMP
    tie_policy: str = TIE_IS_ABSENT

    def __post_init__(self):
        if int(self.guard_radius) != self.guard_radius or self.guard_radius < 0:
            raise ParameterError(f"guard_radius must be an integer >= 0, got {self.guard_radius!r}")
        if int(self.background_radius) != self.background_radius or self.background_radius < 1:
            raise ParameterError(
                f"background_radius must be an integer >= 1, got {self.background_radius!r}"
            )
        if not 0.0 < self.pfa < 1.0:
            raise ParameterError(f"pfa must lie in (0, 1), got {self.pfa!r}")
        if self.border_policy != CLAMP:
            raise ParameterError(f"unsupported border policy {self.border_policy!r}")
        if self.tie_policy != TIE_IS_ABSENT:
            raise ParameterError(f"unsupported tie policy {self.tie_policy!r}")

    @property
    def outer_radius(self) -> int:
        return self.guard_radius + self.background_radius

    @property
    def n_train_interior(self) -> int:
        return (2 * self.outer_radius + 1) ** 2 - (2 * self.guard_radius + 1) ** 2


class Detection(NamedTuple):
    row: int
    col: int
    value: float
    threshold: float


@dataclass(frozen=True)
class DetectionResult:
    """CFAR output: ``mask[i, j]`` is True iff the cell exceeds ``threshold_map[i, j]``.

    ``detections`` lists the True cells by descending cell value (ties broken
    by row, then column).
    """

    mask: np.ndarray
    threshold_map: np.ndarray
    detections: list

    @classmethod
    def from_maps(cls, power_map: np.ndarray, threshold_map: np.ndarray) -> "DetectionResult":
        mask = power_map > threshold_map
        rows, cols = np.nonzero(mask)
        values = power_map[rows, cols]
        order = np.lexsort((cols, rows, -values))
        detections = [
            Detection(int(rows[k]), int(cols[k]), float(values[k]), float(threshold_map[rows[k], cols[k]]))
            for k in order
        ]
        return cls(mask, threshold_map, detections)


def alpha_factor(n_train: int, pfa: float) -> float:
    """CA-CFAR scaling factor ``N * (pfa**(-1/N) - 1)`` for exponential cells.

    With ``T = alpha * mean(training)`` the false-alarm probability of a cell
    is exactly ``pfa`` when cells are i.i.d. exponential.
    """
    if int(n_train) != n_train or n_train < 1:
        raise ParameterError(f"n_train must be a positive integer, got {n_train!r}")
    if not 0.0 < pfa < 1.0:
        raise ParameterError(f"pfa must lie in (0, 1), got {pfa!r}")
    n = int(n_train)
    return n * math.expm1(-math.log(pfa) / n)


def _axis_extents(length: int, guard: int, outer: int):
    idx = np.arange(length)
    return (
        np.maximum(idx - outer, 0),
        np.minimum(idx + outer, length - 1),
        np.maximum(idx - guard, 0),
        np.minimum(idx + guard, length - 1),
    )


def _check_window_fits(shape, params: CfarParams):
    # a cell trains on nothing only if its guard square already covers the
    # whole map, which needs both dimensions no longer than 2*g + 1
    g = params.guard_radius
    rows, cols = shape
    if rows // 2 <= g and cols // 2 <= g:
        raise ConfigurationError(
            f"a {rows}x{cols} map fits inside the {2 * g + 1}x{2 * g + 1} guard window; "
            "some cells would have no training cells"
        )


def training_window(params: CfarParams, cell, dims):
    """Clamped windows of one cell.

    Returns ``(outer, guard, n_train)`` where each rectangle is an inclusive
    ``(r0, r1, c0, c1)`` tuple.
    """
    row, col = cell
    rows, cols = dims
    if not (0 <= row < rows and 0 <= col < cols):
        raise ParameterError(f"cell {cell} is outside a {rows}x{cols} map")
    g, o = params.guard_radius, params.outer_radius
    outer = (max(row - o, 0), min(row + o, rows - 1), max(col - o, 0), min(col + o, cols - 1))
    guard = (max(row - g, 0), min(row + g, rows - 1), max(col - g, 0), min(col + g, cols - 1))
    n_train = _area(outer) - _area(guard)
    if n_train < 1:
        raise ConfigurationError(
            f"cell {cell} of a {rows}x{cols} map has no training cells with guard radius {g}"
        )
    return outer, guard, n_train


def _area(rect) -> int:
    r0, r1, c0, c1 = rect
    return (r1 - r0 + 1) * (c1 - c0 + 1)


def _alpha_table(row_ext, col_ext, pfa: float) -> np.ndarray:
    """alpha indexed by training count, evaluated once per distinct count."""
    olo, ohi, glo, ghi = row_ext
    row_pairs = set(zip((ohi - olo + 1).tolist(), (ghi - glo + 1).tolist()))
    olo, ohi, glo, ghi = col_ext
    col_pairs = set(zip((ohi - olo + 1).tolist(), (ghi - glo + 1).tolist()))
    counts = {ro * co - rg * cg for ro, rg in row_pairs for co, cg in col_pairs}
    table = np.zeros(max(counts) + 1)
    for n in counts:
        table[n] = alpha_factor(n, pfa)
    return table


def _naive_kernel(x, r_olo, r_ohi, r_glo, r_ghi, c_olo, c_ohi, c_glo, c_ghi, alpha, out):
    rows, cols = x.shape
    for i in numba.prange(rows):
        for j in range(cols):
            total = 0.0
            # visit training cells only: full outer span on rows outside the
            # guard square, the two flanks on rows that cross it
            for r in range(r_olo[i], r_ohi[i] + 1):
                if r_glo[i] <= r <= r_ghi[i]:
                    for c in range(c_olo[j], c_glo[j]):
                        total += x[r, c]
                    for c in range(c_ghi[j] + 1, c_ohi[j] + 1):
                        total += x[r, c]
                else:
                    for c in range(c_olo[j], c_ohi[j] + 1):
                        total += x[r, c]
            n = (r_ohi[i] - r_olo[i] + 1) * (c_ohi[j] - c_olo[j] + 1) - (
                r_ghi[i] - r_glo[i] + 1
            ) * (c_ghi[j] - c_glo[j] + 1)
            out[i, j] = alpha[n] * (total / n)


def _integral_kernel(s, r_olo, r_ohi, r_glo, r_ghi, c_olo, c_ohi, c_glo, c_ghi, alpha, out):
    rows, cols = out.shape
    for i in numba.prange(rows):
        ro0 = r_olo[i]
        ro1 = r_ohi[i] + 1
        rg0 = r_glo[i]
        rg1 = r_ghi[i] + 1
        for j in range(cols):
            co0 = c_olo[j]
            co1 = c_ohi[j] + 1
            cg0 = c_glo[j]
            cg1 = c_ghi[j] + 1
            outer = s[ro0, co0] + s[ro1, co1] - (s[ro0, co1] + s[ro1, co0])
            guard = s[rg0, cg0] + s[rg1, cg1] - (s[rg0, cg1] + s[rg1, cg0])
            total = outer - guard
            n = (ro1 - ro0) * (co1 - co0) - (rg1 - rg0) * (cg1 - cg0)
            out[i, j] = alpha[n] * (total / n)


_SERIAL = {
    NAIVE: numba.njit(cache=True)(_naive_kernel),
    INTEGRAL: numba.njit(cache=True)(_integral_kernel),
}
_PARALLEL = {
    NAIVE: numba.njit(cache=True, parallel=True)(_naive_kernel),
    INTEGRAL: numba.njit(cache=True, parallel=True)(_integral_kernel),
}


def _validated_map(power_map) -> np.ndarray:
    x = np.asarray(power_map)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise InputError(f"power map must be a non-empty 2-D matrix, got shape {x.shape}")
    x = np.ascontiguousarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise InputError("power map contains non-finite cells")
    if np.any(x < 0):
        raise InputError("power map contains negative cells; CFAR expects power (|.|^2) values")
    return x


def _run(backend: str, power_map, params: CfarParams, threads: int) -> DetectionResult:
    x = _validated_map(power_map)
    _check_window_fits(x.shape, params)
    row_ext = _axis_extents(x.shape[0], params.guard_radius, params.outer_radius)
    col_ext = _axis_extents(x.shape[1], params.guard_radius, params.outer_radius)
    alpha = _alpha_table(row_ext, col_ext, params.pfa)
    threshold = np.empty_like(x)
    kernels = _SERIAL
    if threads > 1:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
        kernels = _PARALLEL
    source = x if backend == NAIVE else _sat_table(x)
    kernels[backend](source, *row_ext, *col_ext, alpha, threshold)
    return DetectionResult.from_maps(x, threshold)


def cfar2d_naive(power_map, params: CfarParams, *, threads: int = 1) -> DetectionResult:
    """CA-CFAR with every training sum accumulated cell by cell.

    This is the reference backend; its per-cell cost is proportional to the
    training window area.

    Raises
    ------
    InputError
        Negative, non-finite or non-2-D input.
    ConfigurationError
        The map is too small for the guard window.
    """
    return _run(NAIVE, power_map, params, threads)


def cfar2d_integral(power_map, params: CfarParams, *, threads: int = 1) -> DetectionResult:
    """CA-CFAR with training sums read from a summed-area table.

    Same contract as :func:`cfar2d_naive`; building the table is part of the
    call.  Per-cell cost is eight table reads regardless of window size.
    """
    return _run(INTEGRAL, power_map, params, threads)


def cfar2d(power_map, params: CfarParams, backend: str = INTEGRAL, *, threads: int = 1) -> DetectionResult:
    if backend not in BACKENDS:
        raise ParameterError(f"unknown CFAR backend {backend!r}; choose one of {BACKENDS}")
    return _run(backend, power_map, params, threads)


def mismatched_cells(power_map, first: DetectionResult, second: DetectionResult, tie_band: float = TIE_BAND):
    """Cells where two results disagree on detection outside the tie band.

    The tie band is judged against the first result's threshold.
    """
    x = np.asarray(power_map, dtype=np.float64)
    differ = first.mask != second.mask
    t = first.threshold_map
    near_tie = np.abs(x - t) <= tie_band * np.maximum(1.0, t)
    rows, cols = np.nonzero(differ & ~near_tie)
    return list(zip(rows.tolist(), cols.tolist()))
