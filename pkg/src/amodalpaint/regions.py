"""Contact-aware occluded-region identification.

Splits the occluder mask into a primary region (inside the convex hull of
the human/object proximity band plus contact pixels, where hidden content
is most likely) and a secondary region (the rest of the occluder).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ShapeMismatchError, ValidationError
from .hull import ConvexPolygon, convex_hull, rasterize_hull
from .mask import (
    BinaryMask,
    area,
    default_dilation_radius,
    difference,
    dilate,
    foreground_points,
    intersect,
    union,
)


@dataclass(frozen=True)
class SceneMasks:
    """Input masks of one occlusion scene, all at identical dimensions.

    ``human`` and ``obj`` segment the visible parts of each subject. They
    are made mutually exclusive before processing: pixels claimed by both
    are assigned to the occluder. ``contact`` marks human-object contact
    pixels and may be empty; ``smpl`` is an optional body-model silhouette
    used for human completion.
    """

    human: BinaryMask
    obj: BinaryMask
    contact: BinaryMask
    smpl: Optional[BinaryMask] = None
    occluder_is_human: bool = True

    def __post_init__(self) -> None:
        shape = self.human.data.shape
        named = [("object", self.obj), ("contact", self.contact)]
        if self.smpl is not None:
            named.append(("smpl", self.smpl))
        for name, m in named:
            if m.data.shape != shape:
                raise ShapeMismatchError(
                    f"{name} mask is {m.width}x{m.height}, "
                    f"human mask is {self.human.width}x{self.human.height}"
                )

    @property
    def occluder(self) -> BinaryMask:
        return self.human if self.occluder_is_human else self.obj

    @property
    def occludee_visible(self) -> BinaryMask:
        """Occludee mask with any occluder-claimed pixels removed."""
        if self.occluder_is_human:
            return difference(self.obj, self.human)
        return difference(self.human, self.obj)


@dataclass(frozen=True)
class RegionPair:
    """Disjoint primary/secondary split of an occluder mask.

    ``hull`` is the contact-aware convex hull when one was computed in this
    mask's coordinate frame (None after the empty-point fallback or after
    resampling). ``degenerate_fallback`` reports that the split collapsed
    to primary = whole occluder.
    """

    primary: BinaryMask
    secondary: BinaryMask
    hull: Optional[ConvexPolygon] = None
    degenerate_fallback: bool = False

    def __post_init__(self) -> None:
        if self.primary.data.shape != self.secondary.data.shape:
            raise ShapeMismatchError(
                f"primary is {self.primary.width}x{self.primary.height}, "
                f"secondary is {self.secondary.width}x{self.secondary.height}"
            )
        if bool(np.any(self.primary.data & self.secondary.data)):
            raise ValidationError("primary and secondary regions overlap")

    @property
    def union_mask(self) -> BinaryMask:
        return union(self.primary, self.secondary)


def occlusion_boundary(human: BinaryMask, obj: BinaryMask, radius: int) -> BinaryMask:
    """Band where human and object are within 2*radius pixels of each other.

    Computed as the intersection of the two square dilations, i.e. pixels
    with a human pixel and an object pixel both within Chebyshev distance
    ``radius``.
    """
    if radius < 1:
        raise ValidationError(f"boundary radius must be >= 1, got {radius}")
    return intersect(dilate(human, radius), dilate(obj, radius))


def default_contact_radius(width: int) -> int:
    """Contact-point disc radius, 5 px at 512-pixel width, floor 1."""
    return max(1, round(5 * width / 512))


def contact_mask_from_points(
    points: Sequence[tuple[int, int]],
    width: int,
    height: int,
    radius: Optional[int] = None,
) -> BinaryMask:
    """Render contact keypoints as a mask of Euclidean discs."""
    if radius is None:
        radius = default_contact_radius(width)
    grid = np.zeros((height, width), dtype=bool)
    ys, xs = np.ogrid[:height, :width]
    for x, y in points:
        if not (0 <= x < width and 0 <= y < height):
            raise ValidationError(
                f"contact point ({x}, {y}) outside canvas {width}x{height}"
            )
        grid |= (xs - int(x)) ** 2 + (ys - int(y)) ** 2 <= radius * radius
    return BinaryMask(grid)


def identify_regions(scene: SceneMasks, radius: Optional[int] = None) -> RegionPair:
    """Split the occluder into primary and secondary inpainting regions.

    Builds the proximity band between the mutually exclusive human/object
    masks, joins it with the contact mask, takes the convex hull of the
    combined points, and intersects its raster with the occluder. If the
    point set or the resulting primary region is empty, falls back to
    primary = occluder with the fallback flag set so downstream inpainting
    never receives an empty primary mask.
    """
    if radius is None:
        radius = default_dilation_radius(scene.human.width)
    occluder = scene.occluder
    if area(occluder) == 0:
        raise ValidationError("occluder mask is empty")
    occludee = scene.occludee_visible
    if scene.occluder_is_human:
        boundary = occlusion_boundary(occluder, occludee, radius)
    else:
        boundary = occlusion_boundary(occludee, occluder, radius)
    combined = union(boundary, scene.contact)
    empty = BinaryMask.zeros(occluder.width, occluder.height)
    if area(combined) == 0:
        return RegionPair(occluder, empty, None, True)
    hull = convex_hull(foreground_points(combined))
    hull_mask = rasterize_hull(hull, occluder.width, occluder.height)
    primary = intersect(occluder, hull_mask)
    if area(primary) == 0:
        return RegionPair(occluder, empty, hull, True)
    secondary = difference(occluder, primary)
    return RegionPair(primary, secondary, hull, False)


def human_primary_region(smpl: BinaryMask, obj: BinaryMask) -> BinaryMask:
    """Occluded-human region: body-model projection ∩ visible object mask."""
    return intersect(smpl, obj)


def human_repaint_region(
    smpl: BinaryMask, completed_object_mask: BinaryMask
) -> BinaryMask:
    """Repaint variant: body-model projection ∩ completed-object mask.

    The completed-object mask is an input; segmenting it out of a generated
    image is the caller's concern.
    """
    return intersect(smpl, completed_object_mask)
