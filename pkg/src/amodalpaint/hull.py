"""Convex hulls over pixel point sets and their rasterization to masks.

All geometry is integer-exact: cross products use Python's arbitrary
precision ints and scanline intersections use Fractions, so there are no
floating-point robustness issues on pixel grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .mask import BinaryMask, PixelPoint, dilate


def _cross(o: PixelPoint, a: PixelPoint, b: PixelPoint) -> int:
    """Cross product of (a - o) x (b - o); positive for a left turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_segment(a: PixelPoint, b: PixelPoint, p: PixelPoint) -> bool:
    if _cross(a, b, p) != 0:
        return False
    in_x = min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
    in_y = min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    return in_x and in_y


@dataclass(frozen=True, eq=True)
class ConvexPolygon:
    """Convex polygon in strict positive-turn vertex order.

    One or two vertices mark degenerate point/segment hulls. Non-degenerate
    polygons have strictly convex corners: collinear boundary points are
    never stored as vertices.
    """

    vertices: tuple[PixelPoint, ...]

    def __post_init__(self) -> None:
        verts = tuple(PixelPoint(int(p[0]), int(p[1])) for p in self.vertices)
        if len(verts) < 1:
            raise ValidationError("polygon needs at least one vertex")
        n = len(verts)
        for i in range(n):
            if n > 1 and verts[i] == verts[(i + 1) % n]:
                raise ValidationError(f"duplicate consecutive vertex {verts[i]}")
        if n >= 3:
            for i in range(n):
                turn = _cross(verts[i], verts[(i + 1) % n], verts[(i + 2) % n])
                if turn <= 0:
                    raise ValidationError(
                        f"vertices are not in strict convex position at index {i}"
                    )
        object.__setattr__(self, "vertices", verts)

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3


def convex_hull(points: Iterable[PixelPoint]) -> ConvexPolygon:
    """Smallest convex polygon containing every input point.

    Andrew's monotone chain over (x, y)-sorted unique points; collinear
    boundary points are dropped. Collinear input degenerates to a segment,
    a single repeated point to a point hull.
    """
    pts = sorted({(int(p[0]), int(p[1])) for p in points})
    if not pts:
        raise ValidationError("cannot take the hull of an empty point set")
    if len(pts) == 1:
        return ConvexPolygon((PixelPoint(*pts[0]),))

    def chain(seq: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
        out: list[tuple[int, int]] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    verts = lower[:-1] + upper[:-1]
    return ConvexPolygon(tuple(PixelPoint(*p) for p in verts))


def contains(h: ConvexPolygon, p: PixelPoint) -> bool:
    """True iff ``p`` is inside the polygon or on its boundary."""
    v = h.vertices
    if len(v) == 1:
        return (p[0], p[1]) == (v[0][0], v[0][1])
    if len(v) == 2:
        return _on_segment(v[0], v[1], p)
    n = len(v)
    for i in range(n):
        if _cross(v[i], v[(i + 1) % n], p) < 0:
            return False
    return True


def _bresenham(a: PixelPoint, b: PixelPoint) -> list[PixelPoint]:
    x0, y0, x1, y1 = a[0], a[1], b[0], b[1]
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = []
    while True:
        out.append(PixelPoint(x0, y0))
        if x0 == x1 and y0 == y1:
            return out
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def rasterize_hull(h: ConvexPolygon, width: int, height: int) -> BinaryMask:
    """Scanline fill: foreground iff the integer pixel is in the closed hull.

    Degenerate point/segment hulls rasterize to the pixel / Bresenham
    segment dilated by radius 1, so the mask is never empty.
    """
    for v in h.vertices:
        if not (0 <= v.x < width and 0 <= v.y < height):
            raise ValidationError(
                f"vertex {v} outside canvas {width}x{height}"
            )
    grid = np.zeros((height, width), dtype=bool)

    if h.is_degenerate:
        if len(h.vertices) == 1:
            v = h.vertices[0]
            grid[v.y, v.x] = True
        else:
            for p in _bresenham(h.vertices[0], h.vertices[1]):
                grid[p.y, p.x] = True
        return dilate(BinaryMask(grid), 1)

    verts = h.vertices
    n = len(verts)
    y_min = min(v.y for v in verts)
    y_max = max(v.y for v in verts)
    for y in range(y_min, y_max + 1):
        xs: list[Fraction] = []
        for i in range(n):
            a, b = verts[i], verts[(i + 1) % n]
            lo, hi = min(a.y, b.y), max(a.y, b.y)
            if y < lo or y > hi:
                continue
            if a.y == b.y:
                xs.append(Fraction(a.x))
                xs.append(Fraction(b.x))
            else:
                xs.append(Fraction(a.x) + Fraction((y - a.y) * (b.x - a.x), b.y - a.y))
        x_lo = math.ceil(min(xs))
        x_hi = math.floor(max(xs))
        if x_hi >= x_lo:
            grid[y, x_lo : x_hi + 1] = True
    return BinaryMask(grid)
