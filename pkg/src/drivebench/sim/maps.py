"""Road maps: lane centerlines plus a drivable area of convex polygons."""

import json
import math
from functools import lru_cache

import numpy as np

from .collision import agent_corners
from .geometry import (
    closest_point_on_polygon,
    point_in_convex_polygon,
    point_polygon_distance,
    polygon_signed_area,
)
from .types import AgentState, Pose

MAP_SCHEMA_VERSION = 1


class MapModel:
    """Immutable road map.

    Lanes are centerline polylines (>= 2 points each). The drivable area is
    a union of convex polygons; polygons are normalized to CCW winding on
    construction and degenerate ones are rejected.
    """

    def __init__(self, name: str, lanes, drivable_area) -> None:
        self.name = str(name)
        self.lanes = tuple(np.asarray(lane, dtype=float) for lane in lanes)
        polys = []
        for poly in drivable_area:
            arr = np.asarray(poly, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 3:
                raise ValueError("drivable polygon needs at least three 2D vertices")
            area = polygon_signed_area(arr)
            if abs(area) < 1e-9:
                raise ValueError("degenerate drivable polygon")
            if area < 0:
                arr = arr[::-1].copy()
            polys.append(arr)
        self.drivable_area = tuple(polys)
        for lane in self.lanes:
            if lane.ndim != 2 or lane.shape[1] != 2 or len(lane) < 2:
                raise ValueError("lane needs at least two 2D points")
        if not self.drivable_area:
            raise ValueError("map needs at least one drivable polygon")

    def to_json(self) -> str:
        payload = {
            "schema_version": MAP_SCHEMA_VERSION,
            "name": self.name,
            "lanes": [lane.tolist() for lane in self.lanes],
            "drivable_area": [poly.tolist() for poly in self.drivable_area],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MapModel":
        payload = json.loads(text)
        version = payload.get("schema_version")
        if version != MAP_SCHEMA_VERSION:
            raise ValueError(f"unsupported map schema version {version!r}")
        return cls(payload["name"], payload["lanes"], payload["drivable_area"])


def point_on_drivable(x: float, y: float, map_model: MapModel) -> bool:
    p = np.array([x, y])
    return any(point_in_convex_polygon(p, poly) for poly in map_model.drivable_area)


def distance_to_drivable(x: float, y: float, map_model: MapModel) -> float:
    """0 when (x, y) is on the drivable area, else distance to its edge."""
    p = np.array([x, y])
    return min(point_polygon_distance(p, poly) for poly in map_model.drivable_area)


def closest_drivable_point(x: float, y: float, map_model: MapModel) -> np.ndarray:
    """Nearest point of the drivable union; (x, y) itself when on it."""
    p = np.array([x, y])
    best = None
    best_d = math.inf
    for poly in map_model.drivable_area:
        cand = closest_point_on_polygon(p, poly)
        d = float(np.hypot(*(p - cand)))
        if d < best_d:
            best_d = d
            best = cand
        if best_d == 0.0:
            break
    return best


def is_on_road(agent: AgentState, map_model: MapModel) -> bool:
    """True when all four footprint corners lie on the drivable union."""
    corners = agent_corners(agent)
    return all(point_on_drivable(cx, cy, map_model) for cx, cy in corners)


LANE_WIDTH = 3.5
_STRAIGHT_SPAN = (-20.0, 520.0)  # 500 m of route plus spawn margin


def _straight() -> MapModel:
    x0, x1 = _STRAIGHT_SPAN
    lanes = [
        [[x0, -LANE_WIDTH / 2], [x1, -LANE_WIDTH / 2]],  # eastbound
        [[x1, LANE_WIDTH / 2], [x0, LANE_WIDTH / 2]],  # westbound
    ]
    drivable = [[[x0, -LANE_WIDTH], [x1, -LANE_WIDTH], [x1, LANE_WIDTH], [x0, LANE_WIDTH]]]
    return MapModel("straight", lanes, drivable)


_CURVE_RADIUS = 50.0


def _arc(radius: float, start_deg: float, end_deg: float, step_deg: float = 2.5) -> list:
    n = max(2, int(round(abs(end_deg - start_deg) / step_deg)) + 1)
    angles = np.radians(np.linspace(start_deg, end_deg, n))
    return [[radius * math.cos(a), radius * math.sin(a)] for a in angles]


def _curved() -> MapModel:
    r = _CURVE_RADIUS
    inner_lane = r - LANE_WIDTH / 2
    outer_lane = r + LANE_WIDTH / 2
    lanes = [
        _arc(inner_lane, -10.0, 130.0),  # CCW travel direction
        _arc(outer_lane, 130.0, -10.0),
    ]
    r_in, r_out = r - LANE_WIDTH, r + LANE_WIDTH
    polys = []
    edges = np.arange(-10.0, 130.0 + 1e-9, 5.0)
    for a0, a1 in zip(edges[:-1], edges[1:]):
        t0, t1 = math.radians(a0), math.radians(a1)
        polys.append(
            [
                [r_in * math.cos(t0), r_in * math.sin(t0)],
                [r_out * math.cos(t0), r_out * math.sin(t0)],
                [r_out * math.cos(t1), r_out * math.sin(t1)],
                [r_in * math.cos(t1), r_in * math.sin(t1)],
            ]
        )
    return MapModel("curved", lanes, polys)


_ARM = 80.0


def _intersection() -> MapModel:
    h = LANE_WIDTH / 2
    lanes = [
        [[-_ARM, -h], [_ARM, -h]],  # eastbound
        [[_ARM, h], [-_ARM, h]],  # westbound
        [[h, -_ARM], [h, _ARM]],  # northbound
        [[-h, _ARM], [-h, -_ARM]],  # southbound
    ]
    w = LANE_WIDTH
    drivable = [
        [[-_ARM, -w], [_ARM, -w], [_ARM, w], [-_ARM, w]],
        [[-w, -_ARM], [w, -_ARM], [w, _ARM], [-w, _ARM]],
    ]
    return MapModel("intersection", lanes, drivable)


_BUILDERS = {"straight": _straight, "curved": _curved, "intersection": _intersection}


@lru_cache(maxsize=None)
def get_map(name: str) -> MapModel:
    """Look up a built-in map by name."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown map {name!r}; built-ins: {sorted(_BUILDERS)}") from None
    return builder()


def builtin_map_names() -> list[str]:
    return sorted(_BUILDERS)


def left_turn_route() -> np.ndarray:
    """Intersection route: approach eastbound, turn left, exit northbound."""
    h = LANE_WIDTH / 2
    r = 10.0 + h  # arc center (-10, r - h): starts east at x=-10, ends north at x=h
    cx, cy = -10.0, r - h
    pts = [[-_ARM, -h], [cx, -h]]
    for a in np.linspace(-90.0, 0.0, 13)[1:]:
        t = math.radians(a)
        pts.append([cx + r * math.cos(t), cy + r * math.sin(t)])
    pts.append([h, _ARM])
    return np.asarray(pts)


def right_turn_route() -> np.ndarray:
    """Intersection route: approach eastbound, turn right, exit southbound."""
    h = LANE_WIDTH / 2
    r = 4.0  # arc center (-h - r, -h - r): clockwise quarter turn
    cx, cy = -h - r, -h - r
    pts = [[-_ARM, -h], [cx, -h]]
    for a in np.linspace(90.0, 0.0, 10)[1:]:
        t = math.radians(a)
        pts.append([cx + r * math.cos(t), cy + r * math.sin(t)])
    pts.append([-h, -_ARM])
    return np.asarray(pts)
