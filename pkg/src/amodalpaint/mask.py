"""Binary mask representation, set algebra, morphology, and resampling.

A mask is an immutable value object wrapping a read-only boolean numpy
array in (height, width) layout. All operations are pure functions that
return new masks, so masks can be shared freely between threads.

File format: single-channel 8-bit PNG. Any nonzero sample reads as
foreground (robust to anti-aliased sources); writes are exactly 0/255.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import ShapeMismatchError, ValidationError


class PixelPoint(NamedTuple):
    """Integer pixel coordinate: x is the column index, y the row index."""

    x: int
    y: int


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Rectangular boolean grid; True marks foreground."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=bool)
        if arr.ndim != 2:
            raise ValidationError(f"mask data must be 2-D, got {arr.ndim}-D")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"mask dimensions must be >= 1, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )

    @classmethod
    def zeros(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def full(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.ones((height, width), dtype=bool))


def _require_same_shape(a: BinaryMask, b: BinaryMask) -> None:
    if a.data.shape != b.data.shape:
        raise ShapeMismatchError(
            f"mask dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def union(a: BinaryMask, b: BinaryMask) -> BinaryMask:
    """Per-pixel OR of two same-sized masks."""
    _require_same_shape(a, b)
    return BinaryMask(a.data | b.data)


def intersect(a: BinaryMask, b: BinaryMask) -> BinaryMask:
    """Per-pixel AND of two same-sized masks."""
    _require_same_shape(a, b)
    return BinaryMask(a.data & b.data)


def difference(a: BinaryMask, b: BinaryMask) -> BinaryMask:
    """Pixels of ``a`` that are not in ``b``."""
    _require_same_shape(a, b)
    return BinaryMask(a.data & ~b.data)


def complement(m: BinaryMask) -> BinaryMask:
    return BinaryMask(~m.data)


def dilate(m: BinaryMask, radius: int) -> BinaryMask:
    """Minkowski dilation with a square structuring element of side 2*radius+1.

    Radius 0 is the identity. The square (Chebyshev ball) keeps the result
    exactly reproducible with a per-pixel neighborhood sweep.
    """
    if radius < 0:
        raise ValidationError(f"dilation radius must be >= 0, got {radius}")
    if radius == 0:
        return m
    structure = np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)
    return BinaryMask(ndimage.binary_dilation(m.data, structure=structure))


def area(m: BinaryMask) -> int:
    """Number of foreground pixels."""
    return int(np.count_nonzero(m.data))


def foreground_points(m: BinaryMask) -> list[PixelPoint]:
    """All foreground coordinates in row-major order (stable across runs)."""
    ys, xs = np.nonzero(m.data)
    return [PixelPoint(int(x), int(y)) for x, y in zip(xs, ys)]


def resample_nearest(m: BinaryMask, new_width: int, new_height: int) -> BinaryMask:
    """Nearest-neighbor resampling at destination pixel centers.

    Chosen over area-threshold resampling because it preserves thin
    regions (e.g. contact discs) that averaging would erase.
    """
    if new_width < 1 or new_height < 1:
        raise ValidationError(
            f"target dimensions must be >= 1, got {new_width}x{new_height}"
        )
    if new_width == m.width and new_height == m.height:
        return m
    rows = _nearest_indices(m.height, new_height)
    cols = _nearest_indices(m.width, new_width)
    return BinaryMask(m.data[np.ix_(rows, cols)])


def _nearest_indices(src: int, dst: int) -> np.ndarray:
    idx = ((np.arange(dst) + 0.5) * (src / dst)).astype(np.int64)
    return np.minimum(idx, src - 1)


def default_dilation_radius(width: int) -> int:
    """Boundary-band dilation radius, 3 px at 512-pixel width, floor 1."""
    return max(1, round(3 * width / 512))


def read_mask_png(path) -> BinaryMask:
    """Load a mask PNG; any nonzero sample is foreground."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return BinaryMask(arr > 0)


def write_mask_png(m: BinaryMask, path) -> None:
    """Write a mask as an 8-bit grayscale PNG with values exactly 0/255."""
    Image.fromarray(m.data.astype(np.uint8) * 255, mode="L").save(path, format="PNG")
