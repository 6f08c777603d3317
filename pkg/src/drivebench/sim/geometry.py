"""Planar geometry helpers: angle wrapping, segments, convex polygons."""

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap an angle in radians to the interval (-pi, pi].

    The lower bound is open: -pi maps to +pi (the same direction).
    """
    wrapped = math.fmod(angle + math.pi, TWO_PI)
    if wrapped <= 0.0:
        wrapped += TWO_PI
    return wrapped - math.pi


def polygon_signed_area(vertices: np.ndarray) -> float:
    """Signed area of a simple polygon (positive for CCW winding)."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def point_in_convex_polygon(point: np.ndarray, vertices: np.ndarray, tol: float = 1e-9) -> bool:
    """True if ``point`` lies inside a convex CCW polygon (boundary counts)."""
    px, py = float(point[0]), float(point[1])
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross < -tol:
            return False
    return True


def point_segment_distance(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance from ``point`` to the segment ``a``-``b``."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(point - a)))
    t = float((point - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    closest = a + t * ab
    return float(np.hypot(*(point - closest)))


def point_polygon_distance(point: np.ndarray, vertices: np.ndarray) -> float:
    """Distance from a point to a convex polygon; 0 when inside or on it."""
    if point_in_convex_polygon(point, vertices):
        return 0.0
    n = len(vertices)
    return min(
        point_segment_distance(point, vertices[i], vertices[(i + 1) % n])
        for i in range(n)
    )


def closest_point_on_segment(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.asarray(a, dtype=float)
    t = float((point - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return a + t * ab


def closest_point_on_polygon(point: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Nearest polygon point; the point itself when it lies inside."""
    if point_in_convex_polygon(point, vertices):
        return np.asarray(point, dtype=float)
    n = len(vertices)
    best = None
    best_d = math.inf
    for i in range(n):
        cand = closest_point_on_segment(point, vertices[i], vertices[(i + 1) % n])
        d = float(np.hypot(*(point - cand)))
        if d < best_d:
            best_d = d
            best = cand
    return best


def rectangle_corners(
    cx: float, cy: float, heading: float, length: float, width: float
) -> np.ndarray:
    """Corners of an oriented rectangle, CCW order, shape (4, 2).

    ``length`` runs along the heading, ``width`` across it; the rectangle is
    centered on (cx, cy).
    """
    c, s = math.cos(heading), math.sin(heading)
    hl, hw = 0.5 * length, 0.5 * width
    local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([cx, cy])


def polyline_cumulative_lengths(points: np.ndarray) -> np.ndarray:
    """Cumulative arc length at each vertex of a polyline, starting at 0."""
    deltas = np.diff(points, axis=0)
    seg = np.hypot(deltas[:, 0], deltas[:, 1])
    return np.concatenate([[0.0], np.cumsum(seg)])
