"""Dense N-d array substrate: validation, symmetric padding, kernel tiling and cropping.

Images are plain C-contiguous ``float64`` numpy arrays. Every function here
is pure: inputs are never modified and outputs never alias inputs unless
documented (``kernelize`` returns a view).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_RANK = 8


class ShapeError(ValueError):
    """Raised when shapes, ranks or kernel sizes are inconsistent."""


@dataclass(frozen=True)
class PadPlan:
    """Per-dimension padding lengths attached before and after the data."""

    before: tuple[int, ...]
    after: tuple[int, ...]

    @property
    def total(self) -> tuple[int, ...]:
        return tuple(b + a for b, a in zip(self.before, self.after))

    @property
    def ndim(self) -> int:
        return len(self.before)

    def padded_shape(self, shape: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(s) + p for s, p in zip(shape, self.total))


def as_image(data, *, name: str = "image") -> np.ndarray:
    """Convert ``data`` to a validated float64 image.

    Integer inputs are converted to reals. Raises ``ShapeError`` for empty
    arrays or ranks outside ``1..MAX_RANK`` and ``ValueError`` for
    non-finite values.
    """
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim < 1 or arr.ndim > MAX_RANK:
        raise ShapeError(f"{name} must have rank 1..{MAX_RANK}, got {arr.ndim}")
    if arr.size == 0:
        raise ShapeError(f"{name} must contain at least one pixel")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_kernel(shape: Sequence[int], kernel_size: Sequence[int]) -> tuple[int, ...]:
    """Validate kernel sizes against a data shape and return them as a tuple."""
    kernel = tuple(int(k) for k in kernel_size)
    if len(kernel) != len(shape):
        raise ShapeError(
            f"kernel size has {len(kernel)} entries, data has rank {len(shape)}"
        )
    for axis, (s, b) in enumerate(zip(shape, kernel)):
        if b < 1:
            raise ShapeError(f"kernel size along axis {axis} must be positive, got {b}")
        if b > s:
            raise ShapeError(
                f"kernel size {b} exceeds data size {s} along axis {axis}"
            )
    return kernel


def compute_pad_plan(shape: Sequence[int], kernel_size: Sequence[int]) -> PadPlan:
    """Padding that makes every dimension a multiple of the kernel size and
    gives each original pixel a full set of neighbouring kernels.

    The total length along axis ``i`` is ``2*b - 1 - ((s - 1) % b)``, split
    as ``p // 2`` before and ``(p + 1) // 2`` after.

    Examples
    --------
    >>> compute_pad_plan((9,), (4,))
    PadPlan(before=(3,), after=(4,))
    """
    kernel = check_kernel(shape, kernel_size)
    total = [2 * b - 1 - ((int(s) - 1) % b) for s, b in zip(shape, kernel)]
    return PadPlan(
        before=tuple(p // 2 for p in total),
        after=tuple((p + 1) // 2 for p in total),
    )


def symmetric_pad(image: np.ndarray, plan: PadPlan) -> np.ndarray:
    """Mirror-pad ``image`` with the edge pixel included (``d c b a | a b c d``).

    Only a single reflection is supported: each pad length must not exceed
    the extent of its axis.
    """
    if plan.ndim != image.ndim:
        raise ShapeError(f"pad plan has rank {plan.ndim}, image has rank {image.ndim}")
    for axis, (s, lo, hi) in enumerate(zip(image.shape, plan.before, plan.after)):
        if lo < 0 or hi < 0:
            raise ShapeError(f"negative pad length along axis {axis}")
        if lo > s or hi > s:
            raise ShapeError(
                f"pad length ({lo}, {hi}) exceeds extent {s} along axis {axis}"
            )
    return np.pad(image, list(zip(plan.before, plan.after)), mode="symmetric")


def kernelize(padded: np.ndarray, kernel_size: Sequence[int]) -> np.ndarray:
    """View ``padded`` as a grid of kernel blocks.

    Returns an array of shape ``grid + kernel`` where ``grid[i] =
    padded.shape[i] // kernel[i]``; element ``[g0, .., gD-1, k0, .., kD-1]``
    is pixel ``g * kernel + k`` of the padded data. The result is a view.
    """
    kernel = tuple(int(k) for k in kernel_size)
    if len(kernel) != padded.ndim:
        raise ShapeError(
            f"kernel size has {len(kernel)} entries, data has rank {padded.ndim}"
        )
    split = []
    for axis, (s, b) in enumerate(zip(padded.shape, kernel)):
        if b < 1 or s % b:
            raise ShapeError(f"axis {axis} of size {s} is not divisible by kernel size {b}")
        split.extend((s // b, b))
    d = padded.ndim
    blocks = padded.reshape(split)
    return blocks.transpose(tuple(range(0, 2 * d, 2)) + tuple(range(1, 2 * d, 2)))


def grid_shape(padded_shape: Sequence[int], kernel_size: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(s) // int(b) for s, b in zip(padded_shape, kernel_size))


def crop(image: np.ndarray, offset: Sequence[int], out_shape: Sequence[int]) -> np.ndarray:
    """Copy the sub-block starting at ``offset`` with extent ``out_shape``."""
    if len(offset) != image.ndim or len(out_shape) != image.ndim:
        raise ShapeError("offset and out_shape must match the image rank")
    index = []
    for axis, (o, n, s) in enumerate(zip(offset, out_shape, image.shape)):
        o, n = int(o), int(n)
        if o < 0 or n < 0 or o + n > s:
            raise ShapeError(
                f"crop region [{o}, {o + n}) out of bounds for axis {axis} of size {s}"
            )
        index.append(slice(o, o + n))
    return image[tuple(index)].copy()
