"""End-to-end multidimensional CLAHE."""

from __future__ import annotations

import os
import time
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from .core import ShapeError, as_image, check_kernel, compute_pad_plan, kernelize, symmetric_pad
from .histogram import EnhanceParams, IntensityRange, RangeMode, build_mappings
from .interpolation import interpolate


def resolve_threads(threads: int | None) -> int:
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return int(threads)


@contextmanager
def _phase(timings, name):
    start = time.perf_counter()
    yield
    if timings is not None:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def normalize_to_unit(image) -> np.ndarray:
    """Affinely map ``[min, max]`` onto ``[0, 1]``; constant images become 0.5."""
    arr = as_image(image)
    lo, hi = arr.min(), arr.max()
    if hi <= lo:
        return np.full(arr.shape, 0.5)
    return (arr - lo) / (hi - lo)


def mclahe(
    image,
    kernel_size: Sequence[int],
    clip_limit: float = 0.01,
    n_bins: int = 256,
    adaptive_hist_range: bool = False,
    *,
    threads: int | None = 1,
    normalize: bool = True,
    value_range: tuple[float, float] | None = None,
    timings: dict | None = None,
) -> np.ndarray:
    """Contrast limited adaptive histogram equalization in any number of dimensions.

    Parameters
    ----------
    image : array_like
        Input data of rank 1 to 8 with finite values.
    kernel_size : sequence of int
        Kernel extent per axis; each entry must not exceed the data size.
    clip_limit : float
        Fraction in (0, 1] of a kernel's pixel count at which histogram
        bins are clipped. 1 disables clipping.
    n_bins : int
        Number of histogram bins, shared by all kernels.
    adaptive_hist_range : bool
        Use each kernel's own intensity range for its histogram instead of
        the global range.
    threads : int or None
        Worker threads; ``None`` or ``<= 0`` uses every CPU. The output
        does not depend on this value.
    normalize : bool
        Rescale the input to [0, 1] first.
    value_range : (float, float), optional
        Global histogram range. Defaults to the min and max of the
        (normalized) input.
    timings : dict, optional
        Filled with wall time in seconds per phase.

    Returns
    -------
    numpy.ndarray
        Float64 array of the input's shape with values in [0, 1].
    """
    with _phase(timings, "normalize"):
        data = as_image(image)
        kernel = check_kernel(data.shape, kernel_size)
        params = EnhanceParams(
            clip_limit=clip_limit,
            n_bins=n_bins,
            range_mode=RangeMode.ADAPTIVE if adaptive_hist_range else RangeMode.GLOBAL,
        )
        if normalize:
            data = normalize_to_unit(data)
        if value_range is None:
            global_range = IntensityRange(float(data.min()), float(data.max()))
        else:
            global_range = IntensityRange(float(value_range[0]), float(value_range[1]))
    workers = resolve_threads(threads)

    with _phase(timings, "pad"):
        plan = compute_pad_plan(data.shape, kernel)
        blocks = kernelize(symmetric_pad(data, plan), kernel)
    with _phase(timings, "histograms"):
        mappings = build_mappings(blocks, params, global_range, threads=workers)
    del blocks
    with _phase(timings, "interpolation"):
        # only original pixels are transformed, so no crop of padded output is needed
        out = interpolate(data, plan, kernel, mappings, params.adaptive, threads=workers)
    return out


def mclahe_framewise(
    image,
    frame_axis: int,
    kernel_size: Sequence[int],
    clip_limit: float = 0.01,
    n_bins: int = 256,
    adaptive_hist_range: bool = False,
    *,
    threads: int | None = 1,
    renormalize_frames: bool = False,
    timings: dict | None = None,
) -> np.ndarray:
    """Apply ``mclahe`` independently to every slice along ``frame_axis``.

    ``kernel_size`` covers the remaining axes in order. By default the
    whole volume is normalized once and every slice uses the volume's
    global range, so results compare directly with a full-rank run.
    """
    data = as_image(image)
    if data.ndim < 2:
        raise ShapeError("framewise processing needs rank >= 2")
    axis = frame_axis + data.ndim if frame_axis < 0 else frame_axis
    if not 0 <= axis < data.ndim:
        raise ShapeError(f"frame axis {frame_axis} out of range for rank {data.ndim}")
    if len(kernel_size) != data.ndim - 1:
        raise ShapeError(
            f"kernel size has {len(kernel_size)} entries, frames have rank {data.ndim - 1}"
        )
    if not renormalize_frames:
        data = normalize_to_unit(data)
        value_range = (float(data.min()), float(data.max()))
    frames = []
    for k in range(data.shape[axis]):
        frame = np.take(data, k, axis=axis)
        if renormalize_frames:
            out = mclahe(frame, kernel_size, clip_limit, n_bins, adaptive_hist_range,
                         threads=threads, timings=timings)
        else:
            out = mclahe(frame, kernel_size, clip_limit, n_bins, adaptive_hist_range,
                         threads=threads, normalize=False, value_range=value_range,
                         timings=timings)
        frames.append(out)
    return np.stack(frames, axis=axis)
