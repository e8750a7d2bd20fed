"""Kernel histograms, clip-limit redistribution and normalized CDF mappings.

Scalar helpers (``bin_index``, ``compute_histogram``, ``clip_histogram``,
``normalized_cdf``, ``apply_mapping``) document the arithmetic for a single
kernel. ``build_mappings`` runs the same arithmetic vectorised over a whole
kernel grid and is what the pipeline uses.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEGENERATE_VALUE = 0.5


class RangeMode(enum.Enum):
    GLOBAL = "global"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class EnhanceParams:
    """Histogram parameters shared by every kernel.

    ``clip_limit`` is a fraction of the kernel's pixel count.
    """

    clip_limit: float = 0.01
    n_bins: int = 256
    range_mode: RangeMode = RangeMode.GLOBAL

    def __post_init__(self):
        if not (0.0 < float(self.clip_limit) <= 1.0):
            raise ValueError(f"clip_limit must lie in (0, 1], got {self.clip_limit}")
        if int(self.n_bins) != self.n_bins or self.n_bins < 2:
            raise ValueError(f"n_bins must be an integer >= 2, got {self.n_bins}")
        if not isinstance(self.range_mode, RangeMode):
            object.__setattr__(self, "range_mode", RangeMode(self.range_mode))

    @property
    def adaptive(self) -> bool:
        return self.range_mode is RangeMode.ADAPTIVE


@dataclass(frozen=True)
class IntensityRange:
    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("intensity range bounds must be finite")
        if self.lo > self.hi:
            raise ValueError(f"intensity range lo={self.lo} exceeds hi={self.hi}")

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class KernelMapping:
    """Intensity transform of one kernel: a binned normalized CDF."""

    range: IntensityRange
    values: np.ndarray
    degenerate: bool = False

    @property
    def n_bins(self) -> int:
        return len(self.values)


def bin_index(value, lo: float, hi: float, n_bins: int):
    """Uniform bin of ``value`` over ``[lo, hi]``; out-of-range values clamp.

    Works elementwise on arrays. The last bin is closed so ``hi`` maps to
    ``n_bins - 1``.
    """
    if not hi > lo:
        raise ValueError(f"degenerate range [{lo}, {hi}] has no bins")
    # tiny ranges overflow to +-inf, which the clamp maps to the end bins
    with np.errstate(over="ignore"):
        idx = np.floor((np.asarray(value, dtype=np.float64) - lo) / (hi - lo) * n_bins)
    idx = np.clip(idx, 0, n_bins - 1).astype(np.intp)
    return int(idx) if idx.ndim == 0 else idx


def compute_histogram(block, rng: IntensityRange, n_bins: int) -> np.ndarray:
    """Counts (as reals) of the block's pixels in uniform bins over ``rng``.

    A degenerate range puts every pixel in bin 0.
    """
    values = np.asarray(block, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("cannot histogram an empty block")
    if rng.degenerate:
        idx = np.zeros(values.size, dtype=np.intp)
    else:
        idx = bin_index(values, rng.lo, rng.hi, n_bins)
    return np.bincount(idx, minlength=n_bins).astype(np.float64)


def clip_histogram(counts, clip_limit: float) -> np.ndarray:
    """Cap bins at ``clip_limit * N`` and spread the excess uniformly.

    Single pass; operates along the last axis so a stack of histograms can
    be clipped at once. The total count is preserved.
    """
    counts = np.asarray(counts, dtype=np.float64)
    n_bins = counts.shape[-1]
    total = np.cumsum(counts, axis=-1)[..., -1:]
    threshold = clip_limit * total
    excess = np.cumsum(np.maximum(counts - threshold, 0.0), axis=-1)[..., -1:]
    return np.minimum(counts, threshold) + excess / n_bins


def normalized_cdf(counts) -> tuple[np.ndarray, np.ndarray | bool]:
    """Prefix sums rescaled so bin 0 maps to 0 and the last bin to 1.

    Returns ``(values, degenerate)``. Histograms whose mass sits entirely in
    bin 0 get the constant ``DEGENERATE_VALUE`` mapping. Works along the
    last axis; ``degenerate`` is a bool for 1-D input, else a mask.
    """
    counts = np.asarray(counts, dtype=np.float64)
    cdf = np.cumsum(counts, axis=-1)
    first = cdf[..., :1]
    span = cdf[..., -1:] - first
    degenerate = span[..., 0] <= 0
    safe = np.where(span > 0, span, 1.0)
    values = (cdf - first) / safe
    values[degenerate] = DEGENERATE_VALUE
    if counts.ndim == 1:
        return values, bool(degenerate)
    return values, degenerate


def apply_mapping(value, mapping: KernelMapping):
    """Nearest-bin lookup of ``value`` in ``mapping`` (clamped to the end bins)."""
    if mapping.degenerate or mapping.range.degenerate:
        return np.full(np.shape(value), DEGENERATE_VALUE)[()]
    idx = bin_index(value, mapping.range.lo, mapping.range.hi, mapping.n_bins)
    return mapping.values[idx]


def kernel_mapping(block, params: EnhanceParams, global_range: IntensityRange) -> KernelMapping:
    """Mapping of a single kernel; reference path for ``build_mappings``."""
    block = np.asarray(block, dtype=np.float64)
    if params.adaptive:
        rng = IntensityRange(float(block.min()), float(block.max()))
    else:
        rng = global_range
    if rng.degenerate:
        return KernelMapping(rng, np.full(params.n_bins, DEGENERATE_VALUE), True)
    counts = clip_histogram(compute_histogram(block, rng, params.n_bins), params.clip_limit)
    values, degenerate = normalized_cdf(counts)
    return KernelMapping(rng, values, degenerate)


@dataclass(frozen=True)
class MappingGrid:
    """Mappings for every kernel of a grid, stored flat in row-major grid order.

    ``lo`` and ``width`` hold the histogram range of each kernel; degenerate
    kernels carry ``width == 1`` and constant ``DEGENERATE_VALUE`` values so
    lookups need no branching.
    """

    grid: tuple[int, ...]
    lo: np.ndarray
    width: np.ndarray
    values: np.ndarray
    degenerate: np.ndarray

    @property
    def n_bins(self) -> int:
        return self.values.shape[-1]

    def __getitem__(self, index) -> KernelMapping:
        flat = int(np.ravel_multi_index(tuple(index), self.grid))
        lo = float(self.lo[flat])
        degenerate = bool(self.degenerate[flat])
        hi = lo if degenerate else lo + float(self.width[flat])
        return KernelMapping(IntensityRange(lo, hi), self.values[flat].copy(), degenerate)


def _chunk_mappings(blocks, params, global_range, out_lo, out_width, out_values, out_deg):
    n_bins = params.n_bins
    if params.adaptive:
        lo = blocks.min(axis=1)
        hi = blocks.max(axis=1)
    else:
        lo = np.full(len(blocks), global_range.lo)
        hi = np.full(len(blocks), global_range.hi)
    width = hi - lo
    collapsed = width <= 0
    width = np.where(collapsed, 1.0, width)
    with np.errstate(over="ignore"):
        idx = np.floor((blocks - lo[:, None]) / width[:, None] * n_bins)
    idx = np.clip(idx, 0, n_bins - 1).astype(np.intp)
    idx[collapsed] = 0
    idx += (np.arange(len(blocks)) * n_bins)[:, None]
    counts = np.bincount(idx.ravel(), minlength=len(blocks) * n_bins)
    counts = counts.reshape(len(blocks), n_bins).astype(np.float64)
    values, deg = normalized_cdf(clip_histogram(counts, params.clip_limit))
    deg = deg | collapsed
    values[deg] = DEGENERATE_VALUE
    out_lo[:] = lo
    out_width[:] = width
    out_values[:] = values
    out_deg[:] = deg


def build_mappings(
    blocks: np.ndarray,
    params: EnhanceParams,
    global_range: IntensityRange,
    threads: int = 1,
    chunk_kernels: int | None = None,
) -> MappingGrid:
    """Compute the mapping of every kernel in a ``kernelize`` grid.

    ``global_range`` is used in global mode (it should span the unpadded
    data); adaptive mode uses each kernel's own min and max. Kernels are
    independent, so chunks run concurrently; results do not depend on the
    thread count or chunking.
    """
    d = blocks.ndim // 2
    grid = blocks.shape[:d]
    n_kernels = int(np.prod(grid))
    flat = blocks.reshape(n_kernels, -1)
    lo = np.empty(n_kernels)
    width = np.empty(n_kernels)
    values = np.empty((n_kernels, params.n_bins))
    degenerate = np.empty(n_kernels, dtype=bool)

    if chunk_kernels is None:
        # ~4M pixels of temporaries per chunk
        chunk_kernels = max(1, (1 << 22) // max(1, flat.shape[1]))
    bounds = [(i, min(i + chunk_kernels, n_kernels)) for i in range(0, n_kernels, chunk_kernels)]

    def work(span):
        a, b = span
        _chunk_mappings(flat[a:b], params, global_range, lo[a:b], width[a:b], values[a:b], degenerate[a:b])

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, bounds))
    else:
        for span in bounds:
            work(span)
    return MappingGrid(tuple(grid), lo, width, values, degenerate)


def mappings_from_list(mappings: Sequence[KernelMapping], grid: Sequence[int]) -> MappingGrid:
    """Pack per-kernel mappings (row-major grid order) into a ``MappingGrid``."""
    lo = np.array([m.range.lo for m in mappings])
    deg = np.array([m.degenerate or m.range.degenerate for m in mappings])
    width = np.array([1.0 if dg else m.range.hi - m.range.lo for m, dg in zip(mappings, deg)])
    values = np.stack([m.values for m in mappings])
    return MappingGrid(tuple(int(g) for g in grid), lo, width, values, deg)
