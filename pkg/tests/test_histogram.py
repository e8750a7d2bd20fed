import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mclahe.core import compute_pad_plan, kernelize, symmetric_pad
from mclahe.histogram import (
    DEGENERATE_VALUE,
    EnhanceParams,
    IntensityRange,
    KernelMapping,
    RangeMode,
    apply_mapping,
    bin_index,
    build_mappings,
    clip_histogram,
    compute_histogram,
    kernel_mapping,
    normalized_cdf,
)


def test_bin_index_examples():
    assert bin_index(0.0, 0.0, 1.0, 8) == 0
    assert bin_index(1.0, 0.0, 1.0, 8) == 7
    assert bin_index(0.5, 0.0, 1.0, 4) == 2
    assert bin_index(-3.0, 0.0, 10.0, 5) == 0
    assert bin_index(13.0, 0.0, 10.0, 5) == 4
    with pytest.raises(ValueError):
        bin_index(0.0, 1.0, 1.0, 4)


def test_compute_histogram_examples():
    rng01 = IntensityRange(0.0, 1.0)
    assert compute_histogram(np.full(7, 0.3), rng01, 4).tolist() == [0, 7, 0, 0]
    assert compute_histogram([0.0, 0.5, 1.0], rng01, 2).tolist() == [1, 2]
    ramp = np.arange(256) / 255
    assert (compute_histogram(ramp, rng01, 256) == 1).all()
    with pytest.raises(ValueError):
        compute_histogram([], rng01, 4)


def test_clip_histogram_examples():
    np.testing.assert_allclose(clip_histogram([10, 0, 0, 0, 2], 0.5), [6.8, 0.8, 0.8, 0.8, 2.8], rtol=1e-15)
    counts = np.array([5.0, 1.0, 0.0, 9.0])
    assert np.array_equal(clip_histogram(counts, 1.0), counts)
    assert np.array_equal(clip_histogram([3, 3, 3, 3], 0.25), [3, 3, 3, 3])


@settings(max_examples=300, deadline=None)
@given(
    arrays(np.int64, st.integers(2, 64), elements=st.integers(0, 1000)).filter(lambda c: c.sum() > 0),
    st.floats(1e-4, 1.0),
)
def test_clip_preserves_mass(counts, clip):
    clipped = clip_histogram(counts, clip)
    assert (clipped >= 0).all()
    assert abs(clipped.sum() - counts.sum()) <= 1e-9 * counts.sum()
    values, degenerate = normalized_cdf(clipped)
    if not degenerate:
        assert (np.diff(values) >= 0).all()
        assert values[0] >= 0 and values[-1] == 1.0


def test_normalized_cdf_examples():
    values, deg = normalized_cdf([1, 1, 1, 1])
    np.testing.assert_allclose(values, [0, 1 / 3, 2 / 3, 1], rtol=1e-15)
    assert not deg
    values, deg = normalized_cdf([9, 0, 0, 0])
    assert deg and (values == DEGENERATE_VALUE).all()
    values, deg = normalized_cdf([0, 0, 0, 9])
    assert values.tolist() == [0, 0, 0, 1]


def test_apply_mapping_examples():
    m = KernelMapping(IntensityRange(0.0, 1.0), np.array([0, 1 / 3, 2 / 3, 1]))
    assert apply_mapping(-2.0, m) == 0
    assert apply_mapping(1.0, m) == 1
    assert apply_mapping(0.6, m) == 2 / 3
    d = KernelMapping(IntensityRange(0.4, 0.4), np.full(4, 0.5), True)
    assert apply_mapping(0.9, d) == 0.5


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(1, 50), elements=st.floats(0, 1)), st.floats(0.01, 1.0))
def test_apply_mapping_is_monotone(block, clip):
    params = EnhanceParams(clip_limit=clip, n_bins=16, range_mode=RangeMode.ADAPTIVE)
    m = kernel_mapping(block, params, IntensityRange(0.0, 1.0))
    probe = np.linspace(-0.5, 1.5, 101)
    out = apply_mapping(probe, m)
    assert (np.diff(out) >= 0).all()


def _grid_of(values, kernel):
    plan = compute_pad_plan(values.shape, kernel)
    return kernelize(symmetric_pad(values, plan), kernel)


def test_build_mappings_matches_per_kernel_reference(rng):
    image = rng.random((4, 4))
    image = (image - image.min()) / (image.max() - image.min())
    params = EnhanceParams(clip_limit=0.5, n_bins=4)
    blocks = _grid_of(image, (2, 2))
    grid = build_mappings(blocks, params, IntensityRange(0.0, 1.0))
    assert grid.grid == blocks.shape[:2]
    for g in np.ndindex(grid.grid):
        block = blocks[g].ravel()
        # compose the three scalar steps by hand
        counts = np.zeros(4)
        for v in block:
            counts[min(max(int(np.floor(v * 4)), 0), 3)] += 1
        limit = 0.5 * len(block)
        excess = np.maximum(counts - limit, 0).sum()
        counts = np.minimum(counts, limit) + excess / 4
        cdf = np.cumsum(counts)
        expected = (cdf - cdf[0]) / (cdf[-1] - cdf[0]) if cdf[-1] > cdf[0] else np.full(4, 0.5)
        np.testing.assert_allclose(grid[g].values, expected, rtol=0, atol=1e-15)
        ref = kernel_mapping(blocks[g], params, IntensityRange(0.0, 1.0))
        assert np.array_equal(grid[g].values, ref.values)


def test_build_mappings_range_modes():
    blocks = np.array([[0.0, 1.0], [100.0, 101.0]])
    glob = build_mappings(blocks, EnhanceParams(0.5, 4, RangeMode.GLOBAL), IntensityRange(0.0, 101.0))
    adap = build_mappings(blocks, EnhanceParams(0.5, 4, RangeMode.ADAPTIVE), IntensityRange(0.0, 101.0))
    assert glob[(0,)].range == IntensityRange(0.0, 101.0) == glob[(1,)].range
    assert adap[(0,)].range == IntensityRange(0.0, 1.0)
    assert adap[(1,)].range == IntensityRange(100.0, 101.0)


def test_constant_image_adaptive_is_degenerate():
    blocks = _grid_of(np.full((6, 5), 0.7), (3, 2))
    grid = build_mappings(blocks, EnhanceParams(0.1, 8, RangeMode.ADAPTIVE), IntensityRange(0.7, 0.7))
    assert grid.degenerate.all()
    assert (grid.values == DEGENERATE_VALUE).all()


def test_clip_one_is_plain_equalization(rng):
    block = rng.integers(0, 5, size=40) / 4.0
    params = EnhanceParams(clip_limit=1.0, n_bins=8, range_mode=RangeMode.GLOBAL)
    m = kernel_mapping(block, params, IntensityRange(0.0, 1.0))
    counts = np.bincount(np.minimum((block * 8).astype(int), 7), minlength=8)
    cdf = np.cumsum(counts)
    np.testing.assert_allclose(m.values, (cdf - cdf[0]) / (cdf[-1] - cdf[0]))


def test_build_mappings_independent_of_chunking(rng):
    blocks = _grid_of(rng.random((20, 12)), (4, 3))
    params = EnhanceParams(0.05, 32, RangeMode.ADAPTIVE)
    whole = build_mappings(blocks, params, IntensityRange(0.0, 1.0))
    chunked = build_mappings(blocks, params, IntensityRange(0.0, 1.0), threads=3, chunk_kernels=5)
    for field in ("lo", "width", "values", "degenerate"):
        assert np.array_equal(getattr(whole, field), getattr(chunked, field))


def test_enhance_params_validation():
    with pytest.raises(ValueError):
        EnhanceParams(clip_limit=0.0)
    with pytest.raises(ValueError):
        EnhanceParams(clip_limit=1.5)
    with pytest.raises(ValueError):
        EnhanceParams(n_bins=1)
    assert EnhanceParams(range_mode="adaptive").adaptive
