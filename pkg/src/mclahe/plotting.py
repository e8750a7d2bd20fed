"""Report figures rendered to files with the Agg backend."""

from __future__ import annotations

from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "figure.dpi": 100,
    "savefig.bbox": "tight",
}


def central_slice(arr: np.ndarray) -> np.ndarray:
    """2-D slice through the middle of every axis beyond the first two."""
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return arr[None, :]
    index = (slice(None), slice(None)) + tuple(s // 2 for s in arr.shape[2:])
    return arr[index]


def plot_comparison(images: Mapping[str, np.ndarray], path, n_bins: int = 256, title: str | None = None) -> None:
    """Central slices on a shared colour scale above their intensity histograms."""
    names = list(images)
    if not names:
        raise ValueError("nothing to plot")
    vmin = min(float(np.min(images[n])) for n in names)
    vmax = max(float(np.max(images[n])) for n in names)
    with plt.rc_context(RC):
        fig, axes = plt.subplots(2, len(names), figsize=(3.0 * len(names), 5.2), squeeze=False)
        for col, name in enumerate(names):
            data = np.asarray(images[name])
            im = axes[0, col].imshow(central_slice(data), cmap="magma", vmin=vmin, vmax=vmax,
                                     origin="lower", aspect="auto", interpolation="nearest")
            axes[0, col].set_title(name)
            axes[0, col].set_xticks([])
            axes[0, col].set_yticks([])
            axes[1, col].hist(data.ravel(), bins=n_bins, range=(vmin, vmax), color="0.3", log=True)
            axes[1, col].set_xlabel("intensity")
        axes[1, 0].set_ylabel("count")
        fig.colorbar(im, ax=axes[0, :].tolist(), shrink=0.8)
        if title:
            fig.suptitle(title)
        fig.savefig(path)
        plt.close(fig)


def standard_score(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    sd = x.std()
    return (x - x.mean()) / sd if sd > 0 else np.zeros_like(x)


def integrated_dynamics(volume: np.ndarray, mask: np.ndarray, time_axis: int = -1) -> np.ndarray:
    """Sum of ``volume`` over ``mask`` for every index along ``time_axis``."""
    vol = np.moveaxis(np.asarray(volume), time_axis, -1)
    m = np.moveaxis(np.asarray(mask, bool), time_axis, -1)
    return np.array([vol[..., t][m[..., t]].sum() for t in range(vol.shape[-1])])


def plot_dynamics(volumes: Mapping[str, np.ndarray], mask: np.ndarray, path, time_axis: int = -1) -> None:
    """Standard-scored integrated intensity inside ``mask`` versus time."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.0, 2.8))
        for name, vol in volumes.items():
            ax.plot(standard_score(integrated_dynamics(vol, mask, time_axis)), marker="o", ms=3, label=name)
        ax.set_xlabel("time frame")
        ax.set_ylabel("standard score")
        ax.legend(frameon=False)
        fig.savefig(path)
        plt.close(fig)
