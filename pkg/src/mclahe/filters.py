"""Denoising prefilters: separable Gaussian and windowed median.

Both extend the boundary by edge-including mirroring, the same convention
as the histogram padding.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .core import ShapeError, as_image


def gaussian_kernel1d(sigma: float, truncate: float = 4.0) -> np.ndarray:
    """Sampled, sum-normalized Gaussian weights on ``[-r, r]``, ``r = ceil(truncate*sigma)``."""
    radius = int(math.ceil(truncate * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-0.5 * (x / sigma) ** 2)
    return w / w.sum()


def _correlate_axis(arr: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    radius = len(weights) // 2
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (radius, radius)
    # numpy repeats the reflection when the radius exceeds the axis length
    padded = np.pad(arr, pad, mode="symmetric")
    n = arr.shape[axis]
    out = np.zeros(arr.shape)
    for k, w in enumerate(weights):
        out += w * np.take(padded, np.arange(k, k + n), axis=axis)
    return out


def gaussian_filter(image, sigmas: Sequence[float], truncate: float = 4.0) -> np.ndarray:
    """Separable Gaussian smoothing with per-axis standard deviations in pixels.

    Axes with ``sigma == 0`` are left untouched. Passes run in increasing
    order of sigma (ties by axis index), so permuting the axes together
    with the sigmas permutes the output exactly when the sigmas are
    distinct.
    """
    arr = as_image(image)
    sigmas = [float(s) for s in sigmas]
    if len(sigmas) != arr.ndim:
        raise ShapeError(f"got {len(sigmas)} sigmas for an image of rank {arr.ndim}")
    if any(s < 0 for s in sigmas):
        raise ValueError("sigmas must be non-negative")
    if truncate <= 0:
        raise ValueError("truncate must be positive")
    out = arr.copy()
    for axis in sorted(range(arr.ndim), key=lambda a: (sigmas[a], a)):
        if sigmas[axis] > 0:
            out = _correlate_axis(out, gaussian_kernel1d(sigmas[axis], truncate), axis)
    return out


def median_filter(image, window: Sequence[int], chunk_pixels: int = 1 << 22) -> np.ndarray:
    """Median over a moving window of ``window`` pixels per axis.

    Even windows cover offsets ``-(w-1)//2 .. w//2`` and return the mean of
    the two central values.
    """
    arr = as_image(image)
    window = tuple(int(w) for w in window)
    if len(window) != arr.ndim:
        raise ShapeError(f"got {len(window)} window sizes for an image of rank {arr.ndim}")
    if any(w < 1 for w in window):
        raise ValueError("window sizes must be >= 1")
    if all(w == 1 for w in window):
        return arr.copy()
    pad = [((w - 1) // 2, w // 2) for w in window]
    padded = np.pad(arr, pad, mode="symmetric")
    windows = np.lib.stride_tricks.sliding_window_view(padded, window)
    axes = tuple(range(arr.ndim, 2 * arr.ndim))
    out = np.empty(arr.shape)
    # chunk along axis 0 to bound the temporary copy made by np.median
    per_row = int(np.prod(arr.shape[1:])) * int(np.prod(window))
    step = max(1, chunk_pixels // max(1, per_row))
    for a in range(0, arr.shape[0], step):
        out[a:a + step] = np.median(windows[a:a + step], axis=axes)
    return out
