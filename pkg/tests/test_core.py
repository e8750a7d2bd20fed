import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mclahe.core import (
    MAX_RANK,
    PadPlan,
    ShapeError,
    as_image,
    compute_pad_plan,
    crop,
    kernelize,
    symmetric_pad,
)


@pytest.mark.parametrize(
    "shape, kernel, total, before, after",
    [
        ((8,), (4,), 4, 2, 2),
        ((9,), (4,), 7, 3, 4),
        ((1,), (1,), 1, 0, 1),
    ],
)
def test_pad_plan_examples(shape, kernel, total, before, after):
    plan = compute_pad_plan(shape, kernel)
    assert plan.total == (total,)
    assert plan.before == (before,)
    assert plan.after == (after,)


def test_pad_plan_errors():
    with pytest.raises(ShapeError, match="rank"):
        compute_pad_plan((8, 8), (4,))
    with pytest.raises(ShapeError, match="exceeds"):
        compute_pad_plan((3,), (4,))


@st.composite
def shape_and_kernel(draw, max_rank=4, max_size=24):
    rank = draw(st.integers(1, max_rank))
    shape = draw(st.lists(st.integers(1, max_size), min_size=rank, max_size=rank))
    kernel = [draw(st.integers(1, s)) for s in shape]
    return tuple(shape), tuple(kernel)


@settings(max_examples=200, deadline=None)
@given(shape_and_kernel())
def test_pad_plan_laws(sk):
    shape, kernel = sk
    plan = compute_pad_plan(shape, kernel)
    for s, b, p0, p1 in zip(shape, kernel, plan.before, plan.after):
        p = p0 + p1
        assert p == 2 * b - 1 - ((s - 1) % b)
        assert (s + p) % b == 0
        assert p0 == p // 2 and p1 == (p + 1) // 2
        assert p1 <= b <= s
        # a full neighbour set exists for every original pixel
        assert p0 >= b / 2 - 1 and p1 >= b / 2 - 1


@settings(max_examples=100, deadline=None)
@given(shape_and_kernel(max_rank=3, max_size=10), st.integers(0, 2**32 - 1))
def test_pad_then_crop_is_identity(sk, seed):
    shape, kernel = sk
    image = np.random.default_rng(seed).random(shape)
    plan = compute_pad_plan(shape, kernel)
    padded = symmetric_pad(image, plan)
    assert padded.shape == plan.padded_shape(shape)
    assert np.array_equal(crop(padded, plan.before, shape), image)
    blocks = kernelize(padded, kernel)
    assert blocks.shape[len(shape):] == kernel
    assert int(np.prod(blocks.shape)) == padded.size


def test_symmetric_pad_includes_edge():
    a, b, c = 1.0, 2.0, 3.0
    out = symmetric_pad(np.array([a, b, c]), PadPlan((2,), (1,)))
    assert out.tolist() == [b, a, a, b, c, c]


def test_symmetric_pad_identity_and_constant(rng):
    image = rng.random((3, 4))
    assert np.array_equal(symmetric_pad(image, PadPlan((0, 0), (0, 0))), image)
    const = np.full((3, 4), 0.25)
    out = symmetric_pad(const, PadPlan((2, 1), (3, 4)))
    assert out.shape == (8, 9)
    assert (out == 0.25).all()


def test_symmetric_pad_2d_matches_explicit_mirror(rng):
    image = rng.random((4, 3))
    out = symmetric_pad(image, PadPlan((2, 3), (4, 1)))
    for r in range(out.shape[0]):
        for c in range(out.shape[1]):
            i, j = r - 2, c - 3
            i = -i - 1 if i < 0 else (2 * 4 - i - 1 if i >= 4 else i)
            j = -j - 1 if j < 0 else (2 * 3 - j - 1 if j >= 3 else j)
            assert out[r, c] == image[i, j]


def test_symmetric_pad_rejects_long_pad():
    with pytest.raises(ShapeError, match="exceeds"):
        symmetric_pad(np.arange(3.0), PadPlan((4,), (0,)))


@pytest.mark.parametrize(
    "shape, kernel, grid",
    [((8, 8), (4, 4), (2, 2)), ((12,), (4,), (3,)), ((4, 6, 8), (2, 3, 4), (2, 2, 2))],
)
def test_kernelize_grid(shape, kernel, grid):
    padded = np.arange(np.prod(shape), dtype=float).reshape(shape)
    blocks = kernelize(padded, kernel)
    assert blocks.shape == grid + kernel
    # reassemble and compare
    for g in np.ndindex(grid):
        region = tuple(slice(gi * b, (gi + 1) * b) for gi, b in zip(g, kernel))
        assert np.array_equal(blocks[g], padded[region])


def test_kernelize_rejects_non_divisible():
    with pytest.raises(ShapeError, match="divisible"):
        kernelize(np.zeros(10), (4,))


def test_crop_examples(rng):
    image = rng.random((3, 5))
    assert np.array_equal(crop(image, (0, 0), image.shape), image)
    assert crop(np.array([1.0, 2.0, 3.0, 4.0]), (1,), (2,)).tolist() == [2.0, 3.0]
    with pytest.raises(ShapeError, match="out of bounds"):
        crop(image, (2, 0), (2, 5))


def test_as_image_validation():
    assert as_image([1, 2, 3]).dtype == np.float64
    with pytest.raises(ValueError, match="non-finite"):
        as_image([0.0, np.nan])
    with pytest.raises(ShapeError):
        as_image(np.zeros((1,) * (MAX_RANK + 1)))
    with pytest.raises(ShapeError):
        as_image(np.zeros((0, 3)))
