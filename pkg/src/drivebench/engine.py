"""Closed-loop episode runner.

Controllers map (world, agent_index, rng) to an Action; one drives each
agent. The runner records a per-step log, applies scenario triggers
(which swap an NPC's controller the first time they fire), and stops on
collision, route completion, a stuck ego, or the horizon.
"""

import numpy as np

from .evaluation.log import EpisodeLog, StepRecord
from .policies.autopilot import AutopilotConfig, autopilot_act, pure_pursuit_steer
from .policies.network import PolicyParams, policy_act
from .policies.observation import observe
from .sim.collision import detect_collisions
from .sim.maps import MapModel, is_on_road
from .sim.routes import Route, lateral_offset, route_progress
from .sim.dynamics import step_world
from .sim.types import Action, WorldState

STUCK_PATIENCE = 100  # steps without progress before an episode counts as stuck
PROGRESS_EPS = 1e-6
COMPLETE_EPS = 1e-9


class AutopilotController:
    """Rule-based route follower (the default for NPCs and the baseline ego)."""

    def __init__(self, route: Route | None, config: AutopilotConfig | None = None):
        self.route = route
        self.config = config or AutopilotConfig()

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        return autopilot_act(world, agent_index, self.route, self.config)


class PolicyController:
    """Learned Gaussian policy; optionally records (obs, action, log-prob)."""

    def __init__(
        self,
        params: PolicyParams,
        route: Route,
        horizon: int,
        deterministic: bool = False,
        record: bool = False,
    ):
        self.params = params
        self.route = route
        self.horizon = horizon
        self.deterministic = deterministic
        self.trace = [] if record else None

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        obs = observe(world, agent_index, self.route, self.horizon)
        action, logp = policy_act(self.params, obs, rng, self.deterministic)
        if self.trace is not None:
            self.trace.append((obs, action, logp))
        return action


class PlanController:
    """Plays back a fixed action sequence; zero action past its end."""

    def __init__(self, actions):
        self.actions = list(actions)
        self.cursor = 0

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        if self.cursor >= len(self.actions):
            return Action(0.0, 0.0)
        action = self.actions[self.cursor]
        self.cursor += 1
        return action


class ConstantSpeedController:
    """Tracks the route and holds a target speed; never brakes."""

    def __init__(self, route: Route, target_speed: float, gain: float = 1.5):
        self.route = route
        self.target_speed = target_speed
        self.gain = gain

    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        steer = pure_pursuit_steer(world, agent_index, self.route, AutopilotConfig())
        accel = max(0.0, self.gain * (self.target_speed - world.agents[agent_index].speed))
        return Action(steer, min(accel, world.params.max_accel))


class StationaryController:
    def act(self, world: WorldState, agent_index: int, rng) -> Action:
        return Action(0.0, 0.0)


def run_episode(
    world: WorldState,
    controllers,
    ego_route: Route,
    horizon: int,
    map_model: MapModel | None = None,
    triggers=(),
    rng: np.random.Generator | None = None,
    scenario_id: str = "",
    seed: int = 0,
) -> EpisodeLog:
    """Simulate until termination and return the per-step log.

    The log records horizon + 1 states at most (initial state included);
    progress is the running maximum of the route projection, so it never
    decreases. A collision at the current state ends the episode before
    any further action is taken.
    """
    if len(controllers) != len(world.agents):
        raise ValueError("one controller per agent required")
    if rng is None:
        rng = np.random.default_rng(seed)
    controllers = list(controllers)
    triggers = list(triggers)
    log = EpisodeLog(
        scenario_id=scenario_id,
        seed=seed,
        dt=world.dt,
        horizon=horizon,
        roles=tuple(agent.role.value for agent in world.agents),
        footprints=tuple(agent.footprint for agent in world.agents),
    )
    envelope = 0.0
    last_improvement = 0
    termination = "timeout"
    for t in range(horizon + 1):
        collisions = tuple(detect_collisions(world))
        raw_progress = route_progress(world.ego.pose, ego_route)
        if raw_progress > envelope + PROGRESS_EPS:
            envelope = raw_progress
            last_improvement = t
        else:
            envelope = max(envelope, raw_progress)
        on_road = is_on_road(world.ego, map_model) if map_model is not None else True
        log.records.append(
            StepRecord(
                step_index=t,
                agents=tuple(tuple(a.as_array()) for a in world.agents),
                ego_on_road=on_road,
                ego_progress=envelope,
                ego_lateral=lateral_offset(world.ego.pose, ego_route),
                collisions=collisions,
            )
        )
        if any(0 in pair for pair in collisions):
            termination = "collision"
            break
        if envelope >= 1.0 - COMPLETE_EPS:
            termination = "route-complete"
            break
        if t - last_improvement >= STUCK_PATIENCE:
            termination = "stuck"
            break
        if t == horizon:
            break
        for trigger in triggers:
            fired = trigger.poll(world)
            if fired is not None:
                index, controller = fired
                controllers[index] = controller
        actions = [
            controllers[i].act(world, i, rng) for i in range(len(world.agents))
        ]
        world = step_world(world, actions)
    log.termination = termination
    return log
