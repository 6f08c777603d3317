"""Routes as 2D waypoint polylines, with arc-length projection."""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import polyline_cumulative_lengths, wrap_angle
from .types import Pose


@dataclass(frozen=True)
class Projection:
    """Result of projecting a point onto a route."""

    arc_length: float
    distance: float
    signed_offset: float  # positive = left of route direction
    tangent_heading: float


class Route:
    """An ordered polyline of waypoints with cached segment geometry."""

    def __init__(self, waypoints) -> None:
        pts = np.asarray(waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ValueError("route needs at least two 2D waypoints")
        if not np.isfinite(pts).all():
            raise ValueError("route waypoints must be finite")
        self.waypoints = pts
        self.cumulative = polyline_cumulative_lengths(pts)
        self.total_length = float(self.cumulative[-1])
        if self.total_length <= 0:
            raise ValueError("route has zero length")
        self._starts = pts[:-1]
        self._deltas = np.diff(pts, axis=0)
        self._seg_len2 = np.maximum(np.sum(self._deltas**2, axis=1), 1e-300)

    def project(self, x: float, y: float) -> Projection:
        """Nearest point on the route; ties resolve to the earliest segment."""
        p = np.array([x, y])
        rel = p - self._starts
        t = np.clip(np.sum(rel * self._deltas, axis=1) / self._seg_len2, 0.0, 1.0)
        closest = self._starts + t[:, None] * self._deltas
        d2 = np.sum((p - closest) ** 2, axis=1)
        k = int(np.argmin(d2))
        seg = self._deltas[k]
        tangent = math.atan2(seg[1], seg[0])
        off_vec = p - closest[k]
        # z-component of tangent x offset: positive when left of the route
        cross = seg[0] * off_vec[1] - seg[1] * off_vec[0]
        dist = float(math.sqrt(d2[k]))
        signed = math.copysign(dist, cross) if cross != 0.0 else 0.0
        arc = float(self.cumulative[k] + t[k] * math.sqrt(self._seg_len2[k]))
        return Projection(arc, dist, signed, tangent)

    def point_at(self, arc_length: float) -> np.ndarray:
        """Point at a clamped arc length along the route."""
        s = min(self.total_length, max(0.0, arc_length))
        k = int(np.searchsorted(self.cumulative, s, side="right") - 1)
        k = min(k, len(self._deltas) - 1)
        seg_len = math.sqrt(self._seg_len2[k])
        t = (s - self.cumulative[k]) / seg_len if seg_len > 0 else 0.0
        return self._starts[k] + t * self._deltas[k]

    def tangent_at(self, arc_length: float) -> float:
        s = min(self.total_length, max(0.0, arc_length))
        k = int(np.searchsorted(self.cumulative, s, side="right") - 1)
        k = min(k, len(self._deltas) - 1)
        return math.atan2(self._deltas[k][1], self._deltas[k][0])


def route_progress(pose: Pose, route: Route) -> float:
    """Fraction of the route completed by the nearest-point projection.

    Instantaneous value in [0, 1]; episode recording applies a running
    maximum so logged progress never decreases.
    """
    proj = route.project(pose.x, pose.y)
    return proj.arc_length / route.total_length


def lateral_offset(pose: Pose, route: Route) -> float:
    """Unsigned distance (m) from the pose position to the route."""
    return route.project(pose.x, pose.y).distance


def heading_error(pose: Pose, route: Route) -> float:
    """Heading minus route tangent at the nearest point, wrapped."""
    proj = route.project(pose.x, pose.y)
    return wrap_angle(pose.heading - proj.tangent_heading)
