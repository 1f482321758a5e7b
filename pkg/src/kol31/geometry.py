"""Planar helpers: convex hulls, signed containment/separation margins for
convex polygons, and winding numbers of closed polylines.

Polygons are (n, 2) float arrays; points may be complex scalars/arrays or
(m, 2) arrays.  Margins are signed distances so callers can assert strict
inequalities with explicit slack.
"""

from __future__ import annotations

import numpy as np


def as_xy(points) -> np.ndarray:
    """Coerce complex array-likes or (m,2) arrays to an (m,2) float array."""
    a = np.asarray(points)
    if np.iscomplexobj(a):
        return np.column_stack([a.real.ravel(), a.imag.ravel()])
    a = np.atleast_2d(a).astype(float)
    return a


def convex_hull(points) -> np.ndarray:
    """Counterclockwise convex hull (monotone chain), no collinear vertices."""
    pts = np.unique(as_xy(points), axis=0)
    if len(pts) < 3:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def is_ccw_convex(poly) -> bool:
    p = as_xy(poly)
    n = len(p)
    if n < 3:
        return False
    e = np.roll(p, -1, axis=0) - p
    cr = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    return bool(np.all(cr > 0))


def half_planes(poly) -> tuple[np.ndarray, np.ndarray]:
    """Inward half-planes (a, c) of a CCW convex polygon: inside means
    a @ x <= c for every row."""
    p = as_xy(poly)
    e = np.roll(p, -1, axis=0) - p
    # outward normal of a CCW edge is (ey, -ex)
    a = np.column_stack([e[:, 1], -e[:, 0]])
    norms = np.hypot(a[:, 0], a[:, 1])
    a = a / norms[:, None]
    c = np.sum(a * p, axis=1)
    return a, c


def depth_in_convex(poly, points) -> np.ndarray:
    """Signed containment depth of each point in a CCW convex polygon:
    positive inside (distance to the nearest edge line), negative outside."""
    a, c = half_planes(poly)
    xy = as_xy(points)
    return np.min(c[None, :] - xy @ a.T, axis=1)


def containment_margin(inner, outer) -> float:
    """min over vertices of ``inner`` of their containment depth in ``outer``
    (positive means strictly contained)."""
    return float(np.min(depth_in_convex(outer, as_xy(inner))))


def separation_margin(poly_a, poly_b) -> float:
    """Signed separation of two convex polygons by the separating axis test:
    positive = width of the widest empty gap along some edge normal,
    negative = every axis overlaps (minimum penetration, negated)."""
    pa, pb = as_xy(poly_a), as_xy(poly_b)
    best = -np.inf
    worst_overlap = np.inf
    for poly in (pa, pb):
        e = np.roll(poly, -1, axis=0) - poly
        axes = np.column_stack([e[:, 1], -e[:, 0]])
        axes = axes / np.hypot(axes[:, 0], axes[:, 1])[:, None]
        proj_a = pa @ axes.T
        proj_b = pb @ axes.T
        gap1 = proj_b.min(axis=0) - proj_a.max(axis=0)
        gap2 = proj_a.min(axis=0) - proj_b.max(axis=0)
        gap = np.maximum(gap1, gap2)
        best = max(best, float(gap.max()))
        worst_overlap = min(worst_overlap, float(-gap.min()))
    if best > 0:
        return best
    # every axis overlaps: report penetration as negative margin
    return -worst_overlap if worst_overlap < np.inf else best


def winding_number(polyline_xy: np.ndarray, points) -> np.ndarray:
    """Winding numbers of a closed polyline around each query point
    (crossing-number algorithm, vectorized over segments)."""
    poly = as_xy(polyline_xy)
    xy = as_xy(points)
    x0, y0 = poly[:-1, 0], poly[:-1, 1]
    x1, y1 = poly[1:, 0], poly[1:, 1]
    out = np.zeros(len(xy), dtype=np.int64)
    # chunk queries to bound the (queries x segments) temporary
    chunk = max(1, int(4_000_000 // max(1, len(x0))))
    for s in range(0, len(xy), chunk):
        px = xy[s : s + chunk, 0][:, None]
        py = xy[s : s + chunk, 1][:, None]
        upward = (y0 <= py) & (y1 > py)
        downward = (y0 > py) & (y1 <= py)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (py - y0) / (y1 - y0)
            xint = x0 + t * (x1 - x0)
        left = xint > px
        out[s : s + chunk] = np.sum(upward & left, axis=1) - np.sum(
            downward & left, axis=1
        )
    return out
