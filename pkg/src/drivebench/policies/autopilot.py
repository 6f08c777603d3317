"""Rule-based driver: pure-pursuit steering plus IDM-style gap keeping."""

import math
from dataclasses import dataclass

from ..sim.routes import Route
from ..sim.types import Action, WorldState


@dataclass(frozen=True)
class AutopilotConfig:
    desired_speed: float = 8.0
    time_headway: float = 1.5
    comfort_decel: float = 3.0
    accel_gain: float = 2.0
    min_gap: float = 2.0
    lookahead_min: float = 3.0
    lookahead_gain: float = 1.5
    lane_tolerance: float = 2.0  # lateral window for leader detection (m)


DEFAULT_AUTOPILOT = AutopilotConfig()


def pure_pursuit_steer(
    world: WorldState, agent_index: int, route: Route, config: AutopilotConfig
) -> float:
    me = world.agents[agent_index]
    lookahead = max(config.lookahead_min, config.lookahead_gain * me.speed)
    proj = route.project(me.pose.x, me.pose.y)
    target = route.point_at(proj.arc_length + lookahead)
    alpha = math.atan2(target[1] - me.pose.y, target[0] - me.pose.x) - me.pose.heading
    wheelbase = world.params.wheelbase
    steer = math.atan2(2.0 * wheelbase * math.sin(alpha), lookahead)
    return min(world.params.max_steer, max(-world.params.max_steer, steer))


def _leader_gap(world: WorldState, agent_index: int, config: AutopilotConfig):
    """Bumper gap and speed of the nearest agent ahead in this lane corridor."""
    me = world.agents[agent_index]
    cos_h, sin_h = math.cos(me.pose.heading), math.sin(me.pose.heading)
    best = None
    for j, other in enumerate(world.agents):
        if j == agent_index:
            continue
        dx = other.pose.x - me.pose.x
        dy = other.pose.y - me.pose.y
        ahead = dx * cos_h + dy * sin_h
        lateral = -dx * sin_h + dy * cos_h
        if ahead <= 0 or abs(lateral) > config.lane_tolerance:
            continue
        if best is None or ahead < best[0]:
            best = (ahead, other)
    if best is None:
        return None
    ahead, other = best
    gap = ahead - 0.5 * (me.footprint[0] + other.footprint[0])
    return max(gap, 0.1), other.speed


def idm_accel(
    world: WorldState, agent_index: int, config: AutopilotConfig
) -> float:
    me = world.agents[agent_index]
    v = me.speed
    free = 1.0 - (v / config.desired_speed) ** 4
    leader = _leader_gap(world, agent_index, config)
    if leader is None:
        accel = config.accel_gain * free
    else:
        gap, v_lead = leader
        dv = v - v_lead
        desired_gap = config.min_gap + v * config.time_headway + v * dv / (
            2.0 * math.sqrt(config.accel_gain * config.comfort_decel)
        )
        accel = config.accel_gain * (free - (desired_gap / gap) ** 2)
    return min(world.params.max_accel, max(world.params.min_accel, accel))


def autopilot_act(
    world: WorldState,
    agent_index: int,
    route: Route | None,
    config: AutopilotConfig = DEFAULT_AUTOPILOT,
) -> Action:
    """Deterministic rule-based action.

    Steering tracks the route with pure pursuit (lookahead
    max(3, 1.5 v)); acceleration keeps an IDM gap to the nearest agent
    ahead in the lane corridor. A missing or degenerate route yields a
    zero action.
    """
    if route is None or route.total_length <= 0:
        return Action(0.0, 0.0)
    steer = pure_pursuit_steer(world, agent_index, route, config)
    accel = idm_accel(world, agent_index, config)
    return Action(steer, accel)
