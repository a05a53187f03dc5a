"""Independent brute-force oracles shared by the unit and acceptance tests.

These deliberately avoid the library's code paths: hull vertices come from
an O(n^3) all-points side test, point containment from a winding-number
routine, dilation from a per-pixel neighborhood sweep, and the proximity
band from an exhaustive Chebyshev-distance check.
"""
from __future__ import annotations

import numpy as np


def brute_force_hull_vertices(points) -> set[tuple[int, int]]:
    """Hull vertex set via the O(n^3) directed-edge test.

    (p, q) is a hull edge iff every point r is strictly left of p->q, or
    collinear and within the segment. Collinear-outside rejection keeps
    interior points of boundary runs out of the vertex set, matching a
    strict-turn hull. Looping over p keeps the O(n^2) inner tensors
    cache-resident; the op count is still cubic.
    """
    pts = np.unique(np.asarray(list(points), dtype=np.int64), axis=0).astype(np.int32)
    m = len(pts)
    if m == 1:
        return {tuple(map(int, pts[0]))}
    xs, ys = pts[:, 0], pts[:, 1]
    verts: set[tuple[int, int]] = set()
    for i in range(m):
        dx = xs - xs[i]
        dy = ys - ys[i]
        # cross[j, k] = (P_j - P_i) x (P_k - P_i); dot likewise along the edge
        cross = np.outer(dx, dy)
        cross -= np.outer(dy, dx)
        dot = np.outer(dx, dx)
        dot += np.outer(dy, dy)
        len2 = dx * dx + dy * dy
        bad = cross < 0
        bad |= (cross == 0) & ((dot < 0) | (dot > len2[:, None]))
        edge_ok = ~bad.any(axis=1) & (len2 > 0)
        ends = np.nonzero(edge_ok)[0]
        if ends.size:
            verts.add((int(xs[i]), int(ys[i])))
            for j in ends:
                verts.add((int(xs[j]), int(ys[j])))
    return verts


def winding_contains(vertices, p) -> bool:
    """Point-in-polygon by winding number, boundary counted as inside."""
    n = len(vertices)
    px, py = int(p[0]), int(p[1])
    if n == 1:
        return (px, py) == (vertices[0][0], vertices[0][1])
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross == 0:
            if min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by):
                return True
    if n == 2:
        return False
    winding = 0
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if ay <= py < by and cross > 0:
            winding += 1
        elif by <= py < ay and cross < 0:
            winding -= 1
    return winding != 0


def brute_force_dilate(grid: np.ndarray, radius: int) -> np.ndarray:
    """O(W*H*r^2) sweep: each output pixel is the max over its neighborhood."""
    h, w = grid.shape
    out = np.zeros_like(grid)
    for y in range(h):
        for x in range(w):
            y0, y1 = max(0, y - radius), min(h, y + radius + 1)
            x0, x1 = max(0, x - radius), min(w, x + radius + 1)
            out[y, x] = grid[y0:y1, x0:x1].any()
    return out


def brute_force_proximity_band(
    human: np.ndarray, obj: np.ndarray, radius: int
) -> np.ndarray:
    """Pixels with a human pixel AND an object pixel within Chebyshev radius."""
    h, w = human.shape
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            y0, y1 = max(0, y - radius), min(h, y + radius + 1)
            x0, x1 = max(0, x - radius), min(w, x + radius + 1)
            out[y, x] = human[y0:y1, x0:x1].any() and obj[y0:y1, x0:x1].any()
    return out
