"""Summed-area table (integral image) with constant-time rectangle sums.

The table is zero-padded by one row and one column, so ``table[x + 1, y + 1]``
holds the sum of every source entry at or above row ``x`` and at or left of
column ``y``.  A rectangle sum then needs exactly four lookups and no border
branches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import BoundsError, DimensionError, InputError

__all__ = ["SummedAreaTable", "build_sat", "region_sum"]


@numba.njit(cache=True)
def _sat_recurrence(source, table):
    rows, cols = source.shape
    for x in range(rows):
        for y in range(cols):
            table[x + 1, y + 1] = (
                source[x, y] + table[x, y + 1] + table[x + 1, y] - table[x, y]
            )


def _sat_table(source: np.ndarray) -> np.ndarray:
    # no validation; callers have already checked shape and finiteness
    table = np.zeros((source.shape[0] + 1, source.shape[1] + 1), dtype=np.float64)
    _sat_recurrence(np.ascontiguousarray(source, dtype=np.float64), table)
    return table


@dataclass(frozen=True)
class SummedAreaTable:
    """Padded prefix-sum table of an ``rows x cols`` source matrix.

    ``table`` has shape ``(rows + 1, cols + 1)``; its first row and first
    column are zero.  Treat it as read-only.
    """

    rows: int
    cols: int
    table: np.ndarray

    @property
    def total(self) -> float:
        return float(self.table[self.rows, self.cols])

    def region_sum(self, r0: int, r1: int, c0: int, c1: int) -> float:
        return region_sum(self, r0, r1, c0, c1)


def build_sat(source) -> SummedAreaTable:
    """Build the summed-area table of a 2-D matrix.

    Each entry follows ``s(x, y) = i(x, y) + s(x-1, y) + s(x, y-1) - s(x-1, y-1)``
    with out-of-range terms zero.  Accumulation is always in float64, even
    for float32 or integer sources.

    Raises
    ------
    DimensionError
        If ``source`` is not 2-D or has a zero-length axis.
    InputError
        If any entry is NaN or infinite.
    """
    source = np.asarray(source)
    if source.ndim != 2 or source.shape[0] < 1 or source.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {source.shape}")
    source = source.astype(np.float64, copy=False)
    if not np.all(np.isfinite(source)):
        raise InputError("summed-area table source contains non-finite entries")
    table = _sat_table(source)
    table.flags.writeable = False
    return SummedAreaTable(source.shape[0], source.shape[1], table)


def region_sum(sat: SummedAreaTable, r0: int, r1: int, c0: int, c1: int) -> float:
    """Sum of the source over rows ``r0..r1`` and columns ``c0..c1`` (inclusive)."""
    if not (0 <= r0 <= r1 < sat.rows and 0 <= c0 <= c1 < sat.cols):
        raise BoundsError(
            f"rectangle rows {r0}..{r1}, cols {c0}..{c1} is inverted or outside "
            f"a {sat.rows}x{sat.cols} table"
        )
    t = sat.table
    top_left = t[r0, c0]
    top_right = t[r0, c1 + 1]
    bottom_left = t[r1 + 1, c0]
    bottom_right = t[r1 + 1, c1 + 1]
    return float(top_left + bottom_right - (top_right + bottom_left))
