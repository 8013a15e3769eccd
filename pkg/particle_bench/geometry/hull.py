"""Convex hull and farthest-pair (maximum Feret) diameter of pixel sets."""
import math
from typing import NamedTuple

import numpy as np

from ..exceptions import GeometryError


class PixelPoint(NamedTuple):
    x: int
    y: int


def orientation(p, q, r):
    """Positive if p-q-r turn counter-clockwise, negative if clockwise, zero if colinear."""
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def convex_hull(points):
    """Monotone-chain hull, counter-clockwise in (x, y), colinear points dropped.

    With image coordinates (y grows downward) the order appears clockwise on screen.
    """
    unique = sorted({(int(p[0]), int(p[1])) for p in points})
    if not unique:
        raise GeometryError("no points")
    if len(unique) <= 2:
        return [PixelPoint(*p) for p in unique]

    lower = []
    for p in unique:
        while len(lower) > 1 and orientation(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)

    upper = []
    for p in reversed(unique):
        while len(upper) > 1 and orientation(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    hull = lower[:-1] + upper[:-1]
    return [PixelPoint(*p) for p in hull]


def hull_area(hull):
    """Shoelace area of a hull polygon."""
    if len(hull) < 3:
        return 0.0
    xs = np.array([p.x for p in hull], dtype=np.int64)
    ys = np.array([p.y for p in hull], dtype=np.int64)
    return abs(int(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))) / 2.0


def _squared_distance(p, q):
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def _triangle_area2(p, q, r):
    return abs(orientation(p, q, r))


def antipodal_pairs(hull):
    """Yield antipodal vertex pairs of a counter-clockwise hull (rotating calipers)."""
    n = len(hull)
    if n == 1:
        yield hull[0], hull[0]
        return
    if n == 2:
        yield hull[0], hull[1]
        return

    j = 1
    for i in range(n):
        ni = (i + 1) % n
        while _triangle_area2(hull[i], hull[ni], hull[(j + 1) % n]) > _triangle_area2(
            hull[i], hull[ni], hull[j]
        ):
            j = (j + 1) % n
        yield hull[i], hull[j]
        yield hull[ni], hull[j]


def boundary_points(mask):
    """Leftmost and rightmost foreground pixel centers of every row.

    Their hull equals the hull of the whole mask.
    """
    bits = mask.bits
    rows = np.flatnonzero(bits.any(axis=1))
    if rows.size == 0:
        return []
    sub = bits[rows]
    first = np.argmax(sub, axis=1)
    last = sub.shape[1] - 1 - np.argmax(sub[:, ::-1], axis=1)
    points = [PixelPoint(int(x), int(y)) for x, y in zip(first, rows)]
    points += [PixelPoint(int(x), int(y)) for x, y in zip(last, rows)]
    return points


def farthest_pair_points(mask):
    if mask.is_empty():
        raise GeometryError("empty mask")
    hull = convex_hull(boundary_points(mask))
    best = max(antipodal_pairs(hull), key=lambda pair: _squared_distance(*pair))
    return best


def farthest_pair(mask):
    """Largest distance between two foreground pixel centers, in pixels."""
    p, q = farthest_pair_points(mask)
    return math.sqrt(_squared_distance(p, q))
