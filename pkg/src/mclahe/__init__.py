"""Multidimensional contrast limited adaptive histogram equalization."""

from .core import MAX_RANK, PadPlan, ShapeError, as_image, compute_pad_plan, crop, kernelize, symmetric_pad
from .filters import gaussian_filter, median_filter
from .histogram import EnhanceParams, IntensityRange, KernelMapping, RangeMode, build_mappings
from .io import read_npy, read_raw, write_npy
from .metrics import MetricsReport, contrast_report, mse, psnr, rms_contrast, shannon_entropy
from .pipeline import mclahe, mclahe_framewise, normalize_to_unit

__version__ = "0.1.0"

__all__ = [
    "MAX_RANK",
    "EnhanceParams",
    "IntensityRange",
    "KernelMapping",
    "MetricsReport",
    "PadPlan",
    "RangeMode",
    "ShapeError",
    "as_image",
    "build_mappings",
    "compute_pad_plan",
    "contrast_report",
    "crop",
    "gaussian_filter",
    "kernelize",
    "mclahe",
    "mclahe_framewise",
    "median_filter",
    "mse",
    "normalize_to_unit",
    "psnr",
    "read_npy",
    "read_raw",
    "rms_contrast",
    "shannon_entropy",
    "symmetric_pad",
    "write_npy",
]
