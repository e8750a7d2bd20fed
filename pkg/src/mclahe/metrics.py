"""Contrast metrics: MSE, PSNR, RMS contrast and grey-level entropy."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import ShapeError


def _flat(a) -> np.ndarray:
    # contiguous 1-D input lets numpy use its pairwise summation
    return np.ascontiguousarray(a, dtype=np.float64).ravel()


def mse(a, b) -> float:
    """Mean squared error between two arrays of equal shape."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = _flat(a) - _flat(b)
    return float(np.mean(diff * diff))


def psnr(a, b, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical inputs."""
    if peak <= 0:
        raise ValueError("peak must be positive")
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def rms_contrast(a) -> float:
    """Population standard deviation of all values."""
    flat = _flat(a)
    if flat.size == 0:
        raise ValueError("rms contrast of an empty array")
    return float(np.std(flat))


def shannon_entropy(a, n_bins: int = 256) -> float:
    """Entropy in bits of a uniform ``n_bins`` histogram over ``[min, max]``."""
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    flat = _flat(a)
    if flat.size == 0:
        raise ValueError("entropy of an empty array")
    lo, hi = flat.min(), flat.max()
    if hi <= lo:
        return 0.0
    idx = np.clip(np.floor((flat - lo) / (hi - lo) * n_bins), 0, n_bins - 1).astype(np.intp)
    p = np.bincount(idx, minlength=n_bins) / flat.size
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


@dataclass
class MetricsReport:
    std: float
    entropy_bits: float
    n_bins_used: int
    mse: float | None = None
    psnr_db: float | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def contrast_report(a, b=None, n_bins: int = 256, peak: float = 1.0) -> MetricsReport:
    """STD and entropy of ``a``; MSE and PSNR of ``(a, b)`` when ``b`` is given."""
    report = MetricsReport(std=rms_contrast(a), entropy_bits=shannon_entropy(a, n_bins), n_bins_used=n_bins)
    if b is not None:
        report.mse = mse(a, b)
        report.psnr_db = psnr(a, b, peak)
    return report
