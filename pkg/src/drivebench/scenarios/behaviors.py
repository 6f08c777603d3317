"""Scripted NPC behaviors and the distance trigger that activates them.

Until its trigger fires, an NPC follows its route with the rule-based
autopilot at its spawn speed (or just sits there if spawned at rest).
When the ego closes within the trigger distance, the NPC's controller
is swapped once for the scripted behavior.
"""

import math

from ..engine import AutopilotController, StationaryController
from ..policies.autopilot import AutopilotConfig, pure_pursuit_steer
from ..sim.geometry import wrap_angle
from ..sim.maps import MapModel
from ..sim.routes import Route
from ..sim.types import Action, WorldState
from .config import AgentConfig, TriggerSpec

ALIGN_TOLERANCE = 0.3  # m of lateral offset at which a shift counts as done
STEER_GAIN = 2.0


def _speed_tracking_accel(world: WorldState, speed: float, target: float) -> float:
    accel = 1.5 * (target - speed)
    return max(world.params.min_accel, min(world.params.max_accel, accel))


class HardBrakeController:
    """Full brake while holding the current route heading."""

    def __init__(self, route: Route | None):
        self.route = route

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        steer = 0.0
        if self.route is not None and world.agents[agent_index].speed > 0.1:
            steer = pure_pursuit_steer(world, agent_index, self.route, AutopilotConfig())
        return Action(steer, world.params.min_accel)


class StraightLineController:
    """Holds the spawn heading and tracks a target speed (pedestrians)."""

    def __init__(self, target_speed: float):
        self.target_speed = target_speed

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        speed = world.agents[agent_index].speed
        return Action(0.0, _speed_tracking_accel(world, speed, self.target_speed))


class RouteSpeedController:
    """Follows a route at a fixed speed, ignoring all other agents."""

    def __init__(self, route: Route, target_speed: float):
        self.route = route
        self.target_speed = target_speed

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        steer = pure_pursuit_steer(world, agent_index, self.route, AutopilotConfig())
        speed = world.agents[agent_index].speed
        return Action(steer, _speed_tracking_accel(world, speed, self.target_speed))


class LaneShiftController:
    """Drifts an NPC sideways onto a reference route, then settles.

    `direction` is +1 when the NPC travels along the route and -1 when
    it is oncoming. While the lateral offset to the reference route
    exceeds the tolerance, the NPC aims its heading a few degrees off
    the travel direction so the offset shrinks at roughly
    `lateral_rate` m/s. Once aligned it either follows the route
    (cut-in), keeps driving straight against it (oncoming drift), or
    brakes to a stop (pull-in-front-and-stop).
    """

    def __init__(
        self,
        reference: Route,
        lateral_rate: float,
        target_speed: float,
        direction: int = 1,
        stop_when_aligned: bool = False,
    ):
        self.reference = reference
        self.lateral_rate = lateral_rate
        self.target_speed = target_speed
        self.direction = 1 if direction >= 0 else -1
        self.stop_when_aligned = stop_when_aligned
        self.aligned = False

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        agent = world.agents[agent_index]
        proj = self.reference.project(agent.pose.x, agent.pose.y)
        offset = proj.signed_offset
        if abs(offset) <= ALIGN_TOLERANCE:
            self.aligned = True
        if self.aligned:
            if self.stop_when_aligned:
                if agent.speed == 0.0:
                    return Action(0.0, 0.0)
                # keep straightening out while braking to a halt
                steer = STEER_GAIN * wrap_angle(proj.tangent_heading - agent.pose.heading)
                steer = max(-world.params.max_steer, min(world.params.max_steer, steer))
                return Action(steer, world.params.min_accel)
            if self.direction > 0:
                steer = pure_pursuit_steer(
                    world, agent_index, self.reference, AutopilotConfig()
                )
                return Action(
                    steer, _speed_tracking_accel(world, agent.speed, self.target_speed)
                )
            desired = wrap_angle(proj.tangent_heading + math.pi)
        else:
            base = proj.tangent_heading if self.direction > 0 else proj.tangent_heading + math.pi
            side = math.copysign(1.0, offset) if offset != 0.0 else 1.0
            # shallow out the approach inside the last meter so the merge
            # does not overshoot the centerline
            rate = self.lateral_rate * min(1.0, abs(offset))
            slip = math.atan2(rate, max(agent.speed, 0.5))
            desired = wrap_angle(base - self.direction * side * slip)
        steer = STEER_GAIN * wrap_angle(desired - agent.pose.heading)
        steer = max(-world.params.max_steer, min(world.params.max_steer, steer))
        return Action(steer, _speed_tracking_accel(world, agent.speed, self.target_speed))


class DistanceTrigger:
    """Swaps one agent's controller when the ego gets close enough."""

    def __init__(self, agent_index: int, distance: float, factory):
        self.agent_index = agent_index
        self.distance = distance
        self.factory = factory
        self.fired = False

    def poll(self, world: WorldState):
        if self.fired:
            return None
        ego = world.ego.pose
        other = world.agents[self.agent_index].pose
        if math.hypot(other.x - ego.x, other.y - ego.y) < self.distance:
            self.fired = True
            return self.agent_index, self.factory(world, self.agent_index)
        return None


def build_trigger(
    spec: TriggerSpec,
    ego_route: Route,
    npc_route: Route | None,
    map_model: MapModel,
) -> DistanceTrigger:
    """Compile a trigger spec into an armed runtime trigger."""
    agent_index = spec.npc_index + 1  # agent 0 is the ego
    behavior = spec.behavior
    params = spec.params

    def factory(world: WorldState, index: int):
        speed = world.agents[index].speed
        if behavior == "hard-brake":
            return HardBrakeController(npc_route)
        if behavior == "pedestrian-cross":
            return StraightLineController(float(params.get("speed", 1.5)))
        if behavior == "run-red-light":
            if npc_route is None:
                raise ValueError("run-red-light requires the NPC to have a route")
            return RouteSpeedController(npc_route, float(params.get("speed", 10.0)))
        if behavior == "cut-in":
            return LaneShiftController(
                ego_route,
                lateral_rate=float(params.get("lateral_rate", 1.0)),
                target_speed=float(params.get("target_speed", max(speed, 4.0))),
                direction=1,
            )
        if behavior == "pull-in-front-and-stop":
            return LaneShiftController(
                ego_route,
                lateral_rate=float(params.get("lateral_rate", 1.0)),
                target_speed=float(params.get("target_speed", max(speed, 4.0))),
                direction=1,
                stop_when_aligned=True,
            )
        if behavior == "oncoming-drift":
            return LaneShiftController(
                ego_route,
                lateral_rate=float(params.get("lateral_rate", 1.0)),
                target_speed=max(speed, 4.0),
                direction=-1,
            )
        raise ValueError(f"unknown behavior '{behavior}'")

    return DistanceTrigger(agent_index, spec.distance, factory)


def npc_controller(npc: AgentConfig, map_model: MapModel):
    """Pre-trigger behavior: route autopilot at spawn speed, or parked."""
    if npc.route is None or npc.speed <= 0.0:
        return StationaryController()
    config = AutopilotConfig(desired_speed=npc.speed)
    return AutopilotController(Route(npc.route), config)
