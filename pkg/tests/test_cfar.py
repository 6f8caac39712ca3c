import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uwbcfar.cfar import (
    CfarParams,
    alpha_factor,
    cfar2d,
    cfar2d_integral,
    cfar2d_naive,
    mismatched_cells,
    training_window,
)
from uwbcfar.errors import ConfigurationError, InputError, ParameterError

GRID = [(4, 8), (4, 12), (8, 8), (8, 12)]

# 24 * (1000**(1/24) - 1) evaluated with mpmath at 50 digits
ALPHA_24_1E3 = 8.004514371919776616


def enumerated_training_cells(cell, dims, g, b):
    """Training cells of one CUT by brute enumeration over Chebyshev rings."""
    row, col = cell
    rows, cols = dims
    out = []
    for r in range(rows):
        for c in range(cols):
            d = max(abs(r - row), abs(c - col))
            if g < d <= g + b:
                out.append((r, c))
    return out


def reference_cfar(x, g, b, pfa):
    """Independent per-cell oracle: enumerate cells, fsum, alpha from mpmath-free closed form."""
    rows, cols = x.shape
    thr = np.zeros_like(x, dtype=float)
    for i in range(rows):
        for j in range(cols):
            cells = enumerated_training_cells((i, j), (rows, cols), g, b)
            n = len(cells)
            mean = math.fsum(x[r, c] for r, c in cells) / n
            thr[i, j] = n * (pfa ** (-1.0 / n) - 1.0) * mean
    return thr


def test_alpha_at_one_cell_is_exactly_one():
    assert alpha_factor(1, 0.5) == 1.0


def test_alpha_matches_arbitrary_precision():
    assert alpha_factor(24, 1e-3) == pytest.approx(ALPHA_24_1E3, rel=1e-13)


def test_alpha_decreases_with_pfa():
    assert alpha_factor(24, 1e-2) < alpha_factor(24, 1e-3)


@pytest.mark.parametrize("n, pfa", [(0, 0.1), (-3, 0.1), (5, 0.0), (5, 1.0), (5, 1.5), (2.5, 0.1)])
def test_alpha_rejects_bad_parameters(n, pfa):
    with pytest.raises(ParameterError):
        alpha_factor(n, pfa)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"guard_radius": -1},
        {"background_radius": 0},
        {"pfa": 0.0},
        {"pfa": 1.0},
        {"border_policy": "wrap"},
        {"tie_policy": "tie_is_present"},
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ParameterError):
        CfarParams(**kwargs)


def test_interior_window():
    outer, guard, n = training_window(CfarParams(1, 1), (50, 50), (100, 100))
    assert outer == (48, 52, 48, 52)
    assert guard == (49, 51, 49, 51)
    assert n == 16


def test_corner_window_against_enumeration():
    outer, guard, n = training_window(CfarParams(1, 1), (0, 0), (100, 100))
    assert outer == (0, 2, 0, 2)
    assert guard == (0, 1, 0, 1)
    assert n == len(enumerated_training_cells((0, 0), (100, 100), 1, 1)) == 5


def test_table_i_interior_count():
    assert training_window(CfarParams(4, 8), (100, 100), (300, 300))[2] == 25**2 - 9**2 == 544


@pytest.mark.parametrize("dims", [(7, 9), (20, 5), (3, 40)])
@pytest.mark.parametrize("g, b", [(0, 1), (1, 2), (2, 3)])
def test_window_counts_match_enumeration_everywhere(dims, g, b):
    params = CfarParams(g, b)
    for i in range(dims[0]):
        for j in range(dims[1]):
            expected = len(enumerated_training_cells((i, j), dims, g, b))
            if expected == 0:
                with pytest.raises(ConfigurationError):
                    training_window(params, (i, j), dims)
            else:
                assert training_window(params, (i, j), dims)[2] == expected


def test_degenerate_window_is_configuration_error():
    with pytest.raises(ConfigurationError, match="8x8"):
        cfar2d_naive(np.ones((8, 8)), CfarParams(8, 8))
    with pytest.raises(ConfigurationError):
        cfar2d_integral(np.ones((8, 8)), CfarParams(8, 8))


@pytest.mark.parametrize("backend", ["naive", "ii"])
def test_zero_map_has_no_detections(backend):
    result = cfar2d(np.zeros((32, 32)), CfarParams(2, 3), backend)
    assert not result.mask.any()
    assert not result.threshold_map.any()
    assert result.detections == []


@pytest.mark.parametrize("backend", ["naive", "ii"])
def test_constant_map_has_no_detections(backend):
    params = CfarParams(1, 2, 1e-3)
    # alpha > 1 for every clamped count that occurs on the map
    counts = {training_window(params, (i, j), (32, 32))[2] for i in range(32) for j in range(32)}
    assert min(alpha_factor(n, 1e-3) for n in counts) > 1
    result = cfar2d(np.full((32, 32), 2.5), params, backend)
    assert not result.mask.any()


@pytest.mark.parametrize("backend", ["naive", "ii"])
def test_thresholds_match_enumeration_oracle(rng, backend):
    x = rng.exponential(size=(13, 11))
    for g, b in [(0, 1), (1, 2), (2, 2)]:
        got = cfar2d(x, CfarParams(g, b, 0.01), backend).threshold_map
        np.testing.assert_allclose(got, reference_cfar(x, g, b, 0.01), rtol=1e-12)


@pytest.mark.parametrize("backend", ["naive", "ii"])
def test_single_target_is_detected(backend):
    x = np.ones((40, 40))
    x[20, 17] = 50.0
    result = cfar2d(x, CfarParams(2, 4, 1e-3), backend)
    assert [(d.row, d.col) for d in result.detections] == [(20, 17)]
    assert result.detections[0].value == 50.0


def test_detection_list_matches_mask_and_is_sorted(rng):
    x = rng.exponential(size=(64, 64))
    result = cfar2d_integral(x, CfarParams(1, 3, 0.05))
    assert len(result.detections) == int(result.mask.sum()) > 0
    assert all(result.mask[d.row, d.col] for d in result.detections)
    values = [d.value for d in result.detections]
    assert values == sorted(values, reverse=True)
    for d in result.detections:
        assert d.value > d.threshold == result.threshold_map[d.row, d.col]


def test_tie_resolves_to_absent():
    # every training cell equals 1 and alpha(N=8) * 1 is the threshold: put the CUT right on it
    params = CfarParams(0, 1, 0.25)
    t = alpha_factor(8, 0.25)
    x = np.ones((3, 3))
    x[1, 1] = t
    for backend in ("naive", "ii"):
        result = cfar2d(x, params, backend)
        assert result.threshold_map[1, 1] == t
        assert not result.mask[1, 1]


@pytest.mark.parametrize("bad", [-1.0, np.nan, np.inf])
@pytest.mark.parametrize("backend", ["naive", "ii"])
def test_bad_cells_rejected(bad, backend):
    x = np.ones((10, 10))
    x[3, 3] = bad
    with pytest.raises(InputError):
        cfar2d(x, CfarParams(1, 1), backend)


def test_unknown_backend():
    with pytest.raises(ParameterError):
        cfar2d(np.ones((10, 10)), CfarParams(1, 1), "gpu")


@pytest.mark.parametrize("g, b", GRID)
def test_integer_map_table_i_masks_bit_identical(rng, g, b):
    x = rng.integers(0, 20, size=(48, 48)).astype(float)
    params = CfarParams(g, b, 1e-2)
    naive = cfar2d_naive(x, params)
    fast = cfar2d_integral(x, params)
    np.testing.assert_array_equal(naive.mask, fast.mask)
    np.testing.assert_array_equal(naive.threshold_map, fast.threshold_map)


def test_zero_map_outputs_identical():
    params = CfarParams(4, 8)
    a = cfar2d_naive(np.zeros((48, 48)), params)
    b = cfar2d_integral(np.zeros((48, 48)), params)
    assert a.detections == b.detections == []
    np.testing.assert_array_equal(a.threshold_map, b.threshold_map)


def test_parallel_kernels_are_bit_identical(rng):
    x = rng.exponential(size=(70, 50))
    params = CfarParams(2, 3, 1e-2)
    for backend in ("naive", "ii"):
        serial = cfar2d(x, params, backend, threads=1)
        parallel = cfar2d(x, params, backend, threads=2)
        assert serial.threshold_map.tobytes() == parallel.threshold_map.tobytes()


def test_false_alarm_rate_on_exponential_noise():
    rng = np.random.default_rng(7)
    params = CfarParams(2, 4, 0.01)
    hits = cells = 0
    for _ in range(100):
        x = rng.exponential(size=(64, 64))
        mask = cfar2d_integral(x, params).mask
        hits += mask.sum()
        cells += mask.size
    assert abs(hits / cells - 0.01) <= 0.3 * 0.01


shapes = st.tuples(st.integers(8, 40), st.integers(8, 40))
small_params = st.tuples(st.integers(0, 3), st.integers(1, 4), st.sampled_from([1e-4, 1e-3, 1e-2, 0.1]))


@settings(max_examples=40, deadline=None)
@given(shapes, small_params, st.integers(0, 2**32 - 1), st.booleans())
def test_backends_agree(shape, p, seed, integer):
    g, b, pfa = p
    gen = np.random.default_rng(seed)
    x = gen.integers(0, 50, size=shape).astype(float) if integer else gen.exponential(size=shape)
    params = CfarParams(g, b, pfa)
    naive = cfar2d_naive(x, params)
    fast = cfar2d_integral(x, params)
    np.testing.assert_allclose(fast.threshold_map, naive.threshold_map, rtol=1e-9, atol=0)
    assert mismatched_cells(x, naive, fast) == []


@settings(max_examples=30, deadline=None)
@given(shapes, st.integers(0, 2), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_raising_pfa_never_removes_detections(shape, g, b, seed):
    x = np.random.default_rng(seed).exponential(size=shape)
    masks = [cfar2d_integral(x, CfarParams(g, b, pfa)).mask for pfa in (1e-4, 1e-3, 1e-2, 0.1, 0.5)]
    for lower, higher in zip(masks, masks[1:]):
        assert not (lower & ~higher).any()


@settings(max_examples=30, deadline=None)
@given(shapes, st.integers(0, 2), st.integers(1, 3), st.integers(0, 2**32 - 1),
       st.sampled_from([0.25, 2.0, 1024.0, 3.7]))
def test_scale_covariance(shape, g, b, seed, k):
    x = np.random.default_rng(seed).exponential(size=shape)
    params = CfarParams(g, b, 0.05)
    for backend in ("naive", "ii"):
        base = cfar2d(x, params, backend)
        scaled = cfar2d(k * x, params, backend)
        np.testing.assert_allclose(scaled.threshold_map, k * base.threshold_map, rtol=1e-12)
        t = base.threshold_map
        settled = np.abs(x - t) > 1e-9 * np.maximum(1.0, t)
        np.testing.assert_array_equal(scaled.mask[settled], base.mask[settled])
        if k in (0.25, 2.0, 1024.0):  # powers of two scale exactly
            np.testing.assert_array_equal(scaled.mask, base.mask)
