"""2D multi-agent simulation core: types, dynamics, geometry, maps."""

from .collision import agent_corners, detect_collisions, rectangles_overlap
from .dynamics import (
    step_bicycle,
    step_jacobians,
    step_world,
    unroll,
    unroll_single,
    unroll_with_gradient,
)
from .geometry import wrap_angle
from .maps import (
    MapModel,
    builtin_map_names,
    closest_drivable_point,
    distance_to_drivable,
    get_map,
    is_on_road,
    left_turn_route,
    right_turn_route,
)
from .routes import Route, heading_error, lateral_offset, route_progress
from .types import (
    CAR_FOOTPRINT,
    DEFAULT_PARAMS,
    PEDESTRIAN_FOOTPRINT,
    Action,
    AgentRole,
    AgentState,
    KinematicsParams,
    Pose,
    WorldState,
)

__all__ = [
    "Action",
    "AgentRole",
    "AgentState",
    "CAR_FOOTPRINT",
    "DEFAULT_PARAMS",
    "KinematicsParams",
    "MapModel",
    "PEDESTRIAN_FOOTPRINT",
    "Pose",
    "Route",
    "WorldState",
    "agent_corners",
    "builtin_map_names",
    "closest_drivable_point",
    "detect_collisions",
    "distance_to_drivable",
    "get_map",
    "heading_error",
    "is_on_road",
    "lateral_offset",
    "left_turn_route",
    "rectangles_overlap",
    "right_turn_route",
    "route_progress",
    "step_bicycle",
    "step_jacobians",
    "step_world",
    "unroll",
    "unroll_single",
    "unroll_with_gradient",
    "wrap_angle",
]
