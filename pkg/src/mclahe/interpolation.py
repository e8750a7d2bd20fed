"""Multilinear blending of the 2**D nearest kernel mappings.

Kernel ``g`` along an axis of kernel size ``b`` is centred at padded
coordinate ``g*b + (b - 1)/2``. A pixel at ``x`` has a lower neighbour at
distance ``d0`` and an upper one at ``d1 = b - d0``; the Lagrange weight of
a corner ``i`` in ``{0, 1}**D`` is ``prod_j (b_j - d_{j,i_j}) / b_j``.
Corners are enumerated row-major over their bits, axis 0 most significant.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .core import PadPlan, ShapeError
from .histogram import KernelMapping, MappingGrid, apply_mapping

# corner numerators are exact integers below this bound
_EXACT_PRODUCT_LIMIT = 1 << 62


@dataclass(frozen=True)
class NeighborSet:
    lower: tuple[int, ...]
    d0: tuple[float, ...]
    d1: tuple[float, ...]

    @property
    def ndim(self) -> int:
        return len(self.lower)

    def corners(self) -> list[tuple[int, ...]]:
        """Grid indices of all 2**D neighbours in corner enumeration order."""
        d = self.ndim
        out = []
        for corner in range(1 << d):
            bits = [(corner >> (d - 1 - j)) & 1 for j in range(d)]
            out.append(tuple(g + bit for g, bit in zip(self.lower, bits)))
        return out


def kernel_center(index: int, size: int) -> float:
    return index * size + (size - 1) / 2


def neighbor_kernels(coord: Sequence[float], kernel_size: Sequence[int], grid: Sequence[int]) -> NeighborSet:
    """Locate the lower neighbour kernel and centre distances for a padded-space pixel."""
    if not (len(coord) == len(kernel_size) == len(grid)):
        raise ShapeError("coordinate, kernel size and grid must share a rank")
    lower, d0s, d1s = [], [], []
    for axis, (x, b, g) in enumerate(zip(coord, kernel_size, grid)):
        lo = int(np.floor((x - (b - 1) / 2) / b))
        lo = min(max(lo, 0), g - 2)
        d0 = x - kernel_center(lo, b)
        if lo < 0 or d0 < 0 or d0 > b:
            raise ValueError(
                f"coordinate {x} on axis {axis} lies outside the interpolation region"
            )
        lower.append(lo)
        d0s.append(float(d0))
        d1s.append(float(b - d0))
    return NeighborSet(tuple(lower), tuple(d0s), tuple(d1s))


def interp_coefficients(ns: NeighborSet, kernel_size: Sequence[int]) -> np.ndarray:
    """Lagrange weights of the 2**D corners, in corner enumeration order."""
    per_axis = [
        np.array([(b - d0) / b, (b - d1) / b])
        for b, d0, d1 in zip(kernel_size, ns.d0, ns.d1)
    ]
    return reduce(np.multiply.outer, per_axis).ravel()


def transform_pixel(value: float, mappings: Sequence[KernelMapping], coefficients) -> float:
    if len(mappings) != len(coefficients):
        raise ValueError("need one coefficient per neighbour mapping")
    return float(sum(c * apply_mapping(value, m) for c, m in zip(coefficients, mappings)))


@dataclass(frozen=True)
class _AxisTable:
    kernel_offset: tuple[np.ndarray, np.ndarray]
    numerator: tuple[np.ndarray, np.ndarray]


def _axis_tables(shape, plan: PadPlan, kernel_size, grid) -> list[_AxisTable]:
    strides = np.cumprod((1,) + tuple(grid[:0:-1]))[::-1]
    tables = []
    for s, before, b, g, stride in zip(shape, plan.before, kernel_size, grid, strides):
        x = np.arange(s, dtype=np.int64) + before
        # twice the coordinates keeps half-integer centres exact
        lower = np.clip((2 * x - b + 1) // (2 * b), 0, g - 2)
        twice_d0 = 2 * x - (2 * lower * b + b - 1)
        if (twice_d0 < 0).any() or (twice_d0 > 2 * b).any():
            raise ShapeError("padding too small for a full neighbour set")
        off = lower * int(stride)
        tables.append(
            _AxisTable(
                kernel_offset=(off, off + int(stride)),
                numerator=(2 * b - twice_d0, twice_d0),
            )
        )
    return tables


@np.errstate(over="ignore")
def _tile(values, coords, tables, mappings: MappingGrid, adaptive, den, exact):
    n_bins = mappings.n_bins
    flat_values = mappings.values.ravel()
    # expand corners axis by axis; list order is the corner enumeration order
    corners = [(np.zeros(len(values), np.int64), np.ones(len(values), np.int64 if exact else np.float64))]
    for c, table in zip(coords, tables):
        offs = (table.kernel_offset[0][c], table.kernel_offset[1][c])
        nums = (table.numerator[0][c], table.numerator[1][c])
        if not exact:
            nums = (nums[0].astype(np.float64), nums[1].astype(np.float64))
        corners = [(k + offs[bit], w * nums[bit]) for k, w in corners for bit in (0, 1)]

    if not adaptive:
        lo, width = mappings.lo[0], mappings.width[0]
        shared_bin = np.clip(np.floor((values - lo) / width * n_bins), 0, n_bins - 1).astype(np.int64)

    terms = np.empty((len(corners), len(values)))
    for row, (k, w) in enumerate(corners):
        if adaptive:
            b = np.floor((values - mappings.lo[k]) / mappings.width[k] * n_bins)
            b = np.clip(b, 0, n_bins - 1).astype(np.int64)
        else:
            b = shared_bin
        np.multiply(w, flat_values[k * n_bins + b], out=terms[row])
    # summing in sorted order makes the result independent of axis labelling
    terms.sort(axis=0)
    acc = terms[0].copy()
    for row in terms[1:]:
        acc += row
    acc /= den
    return np.clip(acc, 0.0, 1.0, out=acc)


def interpolate(
    image: np.ndarray,
    plan: PadPlan,
    kernel_size: Sequence[int],
    mappings: MappingGrid,
    adaptive: bool,
    threads: int = 1,
    tile_pixels: int | None = None,
) -> np.ndarray:
    """Transform every pixel of the unpadded ``image`` through its neighbour mappings.

    ``plan`` locates the image inside the padded array the mappings were
    built from. Work is split into tiles of consecutive row-major pixels;
    tiles are independent and the output is bit-identical for any
    ``threads`` or ``tile_pixels``.
    """
    kernel_size = tuple(int(b) for b in kernel_size)
    d = image.ndim
    if not (plan.ndim == len(kernel_size) == len(mappings.grid) == d):
        raise ShapeError("image, pad plan, kernel size and mapping grid must share a rank")
    tables = _axis_tables(image.shape, plan, kernel_size, mappings.grid)
    den = 1
    for b in kernel_size:
        den *= 2 * b
    exact = den < _EXACT_PRODUCT_LIMIT

    flat = image.ravel()
    out = np.empty(flat.size)
    if tile_pixels is None:
        tile_pixels = max(256, (1 << 21) >> d)
    bounds = [(a, min(a + tile_pixels, flat.size)) for a in range(0, flat.size, tile_pixels)]

    def work(span):
        a, b = span
        coords = np.unravel_index(np.arange(a, b), image.shape)
        out[a:b] = _tile(flat[a:b], coords, tables, mappings, adaptive, float(den), exact)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, bounds))
    else:
        for span in bounds:
            work(span)
    return out.reshape(image.shape)
