"""Fixed-length observation vector for driving policies."""

import math

import numpy as np

from ..sim.geometry import wrap_angle
from ..sim.routes import Route
from ..sim.types import WorldState

OBSERVATION_DIM = 10
# reported when the agent is alone: far away, no relative motion
NO_NEIGHBOR = (100.0, 0.0, 0.0, 0.0)
# reference cruise speed for the speed-gap feature (same value the
# autopilot tracks)
CRUISE_SPEED = 8.0
DEFAULT_HORIZON = 600


def observe(
    world: WorldState, agent_index: int, route: Route, horizon: int = DEFAULT_HORIZON
) -> np.ndarray:
    """Build the 10-feature observation for one agent.

    Features, in order:
      0  heading error to the route tangent (rad)
      1  signed lateral offset to the route (m, positive = left)
      2  speed (m/s)
      3  cruise-speed gap (m/s): reference speed minus current speed
      4  nearest agent, relative x in this agent's frame (m)
      5  nearest agent, relative y (m)
      6  nearest agent, speed difference (m/s)
      7  nearest agent, heading difference (rad)
      8  distance to the route end along the route (m)
      9  episode time fraction, step_index / horizon

    With no other agent present, features 4..7 take the sentinel
    (100, 0, 0, 0).
    """
    me = world.agents[agent_index]
    proj = route.project(me.pose.x, me.pose.y)
    obs = np.empty(OBSERVATION_DIM)
    obs[0] = wrap_angle(me.pose.heading - proj.tangent_heading)
    obs[1] = proj.signed_offset
    obs[2] = me.speed
    obs[3] = CRUISE_SPEED - me.speed
    nearest = None
    best = math.inf
    for j, other in enumerate(world.agents):
        if j == agent_index:
            continue
        d = math.hypot(other.pose.x - me.pose.x, other.pose.y - me.pose.y)
        if d < best:
            best, nearest = d, other
    if nearest is None:
        obs[4:8] = NO_NEIGHBOR
    else:
        dx = nearest.pose.x - me.pose.x
        dy = nearest.pose.y - me.pose.y
        cos_h, sin_h = math.cos(me.pose.heading), math.sin(me.pose.heading)
        obs[4] = dx * cos_h + dy * sin_h
        obs[5] = -dx * sin_h + dy * cos_h
        obs[6] = nearest.speed - me.speed
        obs[7] = wrap_angle(nearest.pose.heading - me.pose.heading)
    obs[8] = route.total_length - proj.arc_length
    obs[9] = world.step_index / horizon if horizon > 0 else 0.0
    return obs
