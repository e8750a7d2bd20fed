"""Synthetic test volumes: Gaussian blobs in a bright and a faint region.

The region split mimics spectroscopy data whose upper band is orders of
magnitude dimmer than the lower one. When the rank is at least 4 the last
axis is time and the faint blobs follow a smooth activation profile while
the bright ones deplete slightly.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

DEFAULT_SHAPE = (32, 32, 16, 8)


def activation_profile(n: int, onset: float = 0.3, decay: float = 0.5, baseline: float = 0.0) -> np.ndarray:
    """Smooth rise around ``onset`` followed by exponential decay; values in (0, 1]."""
    t = np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(1)
    rise = 1.0 / (1.0 + np.exp(-(t - onset) / 0.05))
    fall = np.exp(-np.clip(t - onset, 0.0, None) / decay)
    profile = baseline + rise * fall
    return profile / profile.max()


def split_axis(ndim: int) -> int:
    return min(2, ndim - 1)


def _blobs(rng, coords, lo, hi, n_blobs, widths):
    field = np.zeros(coords[0].shape)
    for _ in range(n_blobs):
        centre = [rng.uniform(a, b) for a, b in zip(lo, hi)]
        sigma = [rng.uniform(*w) for w in widths]
        r2 = sum(((c - m) / s) ** 2 for c, m, s in zip(coords, centre, sigma))
        field += rng.uniform(0.5, 1.0) * np.exp(-0.5 * r2)
    return field


def synth_volume(
    shape: Sequence[int] = DEFAULT_SHAPE,
    seed: int = 0,
    faint_scale: float = 100.0,
    n_blobs: int = 6,
    noise: float = 0.05,
) -> tuple[np.ndarray, np.ndarray]:
    """Generate a blob volume and the boolean mask of its faint region.

    The faint region is the upper half along axis ``split_axis(ndim)``. Each
    region is scaled so its maximum is 1 (bright) and ``1 / faint_scale``
    (faint). Output is deterministic for a given seed.
    """
    shape = tuple(int(s) for s in shape)
    if not shape or any(s < 1 for s in shape):
        raise ValueError(f"invalid shape {shape}")
    if faint_scale <= 0:
        raise ValueError("faint_scale must be positive")
    rng = np.random.default_rng(seed)
    ndim = len(shape)
    time_axis = ndim - 1 if ndim >= 4 else None
    spatial = [a for a in range(ndim) if a != time_axis]
    sp_shape = tuple(shape[a] for a in spatial)
    coords = np.meshgrid(*[np.arange(s, dtype=np.float64) for s in sp_shape], indexing="ij")

    cut_axis = spatial.index(split_axis(ndim))
    cut = sp_shape[cut_axis] // 2
    region = coords[cut_axis] >= cut if sp_shape[cut_axis] > 1 else np.ones(sp_shape, bool)
    lo_bright = [0.0] * len(sp_shape)
    hi_bright = [s - 1.0 for s in sp_shape]
    hi_bright[cut_axis] = max(cut - 1.0, 0.0)
    lo_faint = [0.0] * len(sp_shape)
    lo_faint[cut_axis] = float(cut)
    hi_faint = [s - 1.0 for s in sp_shape]
    widths = [(max(0.5, s / 12), max(1.0, s / 5)) for s in sp_shape]

    bright = _blobs(rng, coords, lo_bright, hi_bright, n_blobs, widths)
    faint = _blobs(rng, coords, lo_faint, hi_faint, n_blobs, widths)

    if time_axis is None:
        volume = np.where(region, faint, bright)
    else:
        act = activation_profile(shape[time_axis])
        depletion = 1.0 - 0.3 * act
        volume = np.where(region[..., None], faint[..., None] * act, bright[..., None] * depletion)
        region = np.broadcast_to(region[..., None], shape).copy()

    volume = np.abs(volume + noise * rng.standard_normal(shape) * volume.max())
    out = np.empty(shape)
    for mask, peak in ((~region, 1.0), (region, 1.0 / faint_scale)):
        vals = volume[mask]
        if vals.size:
            out[mask] = vals * (peak / vals.max()) if vals.max() > 0 else 0.0
    return out, region
