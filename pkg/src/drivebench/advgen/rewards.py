"""Adversarial reward shaping for trained traffic agents.

Two reward families: a pursuit reward that pays for closing in on the
ego while staying plausible (keeping distance between adversaries and
staying on the road), and a goal reward that pays for progress toward a
conflict point, with terminal bonuses.
"""

import math
from dataclasses import dataclass

from ..scenarios.config import ScenarioConfig
from ..sim.maps import MapModel, distance_to_drivable
from ..sim.routes import Route
from ..sim.types import AgentRole, WorldState

SIGMA_DEV = 2.0  # width of the off-road Gaussian potential (m)
ADV_SAFE_DISTANCE = 5.0  # saturation distance for the inter-adversary term (m)


@dataclass(frozen=True)
class PursuitWeights:
    """R = -d(ego, adv)/ego_scale + spacing_weight * clip(min pair dist / 5)
    - deviation_weight * (1 - exp(-offroad^2 / (2 * 2^2)))."""

    spacing_weight: float = 0.5
    deviation_weight: float = 1.0
    ego_scale: float = 20.0

    def __post_init__(self):
        if self.spacing_weight < 0 or self.deviation_weight < 0:
            raise ValueError("reward weights must be >= 0")
        if self.ego_scale <= 0:
            raise ValueError("ego_scale must be > 0")


@dataclass(frozen=True)
class GoalConfig:
    goal: tuple[float, float]
    bonus: float = 15.0
    radius: float = 2.0
    mode: str = "intent"  # or "literal"

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("goal radius must be > 0")
        if self.mode not in ("intent", "literal"):
            raise ValueError("mode must be 'intent' or 'literal'")


def _adversary_indices(world: WorldState, adversary_index: int) -> list:
    indices = {adversary_index}
    for i, agent in enumerate(world.agents):
        if i != 0 and agent.role is AgentRole.ADVERSARY:
            indices.add(i)
    return sorted(indices)


def pursuit_reward(
    world: WorldState,
    map_model: MapModel,
    adversary_index: int,
    weights: PursuitWeights = PursuitWeights(),
) -> float:
    """Dense reward for one adversary at one world state.

    The spacing term uses the minimum pairwise distance between
    adversaries, saturating at 5 m; with a single adversary it sits at
    its saturated maximum. The deviation term is a Gaussian potential in
    the adversary's distance to the drivable area (zero on the road).
    """
    if not (1 <= adversary_index < len(world.agents)):
        raise ValueError("adversary_index must point at a non-ego agent")
    ego = world.agents[0].pose
    adv = world.agents[adversary_index].pose
    d_ego = math.hypot(adv.x - ego.x, adv.y - ego.y)
    reward = -d_ego / weights.ego_scale

    indices = _adversary_indices(world, adversary_index)
    if len(indices) < 2:
        spacing = 1.0
    else:
        min_pair = min(
            math.hypot(
                world.agents[i].pose.x - world.agents[j].pose.x,
                world.agents[i].pose.y - world.agents[j].pose.y,
            )
            for a, i in enumerate(indices)
            for j in indices[a + 1 :]
        )
        spacing = min(1.0, min_pair / ADV_SAFE_DISTANCE)
    reward += weights.spacing_weight * spacing

    off = distance_to_drivable(adv.x, adv.y, map_model)
    reward -= weights.deviation_weight * (1.0 - math.exp(-(off**2) / (2.0 * SIGMA_DEV**2)))
    return reward


def goal_reward(
    world: WorldState,
    world_prev: WorldState,
    collisions,
    adversary_index: int,
    config: GoalConfig,
) -> float:
    """Per-step goal-seeking reward.

    In intent mode: + (distance shrink toward the goal) + bonus when
    within the goal radius - bonus when the adversary collides with a
    non-ego agent. Literal mode applies the mirrored sign convention
    (away-from-goal progress and non-ego collisions are paid, reaching
    the goal is penalized); it exists for fidelity comparisons.
    """
    if world_prev is None:
        raise ValueError("goal_reward needs the previous world state")
    if not (1 <= adversary_index < len(world.agents)):
        raise ValueError("adversary_index must point at a non-ego agent")
    gx, gy = config.goal
    adv = world.agents[adversary_index].pose
    prev = world_prev.agents[adversary_index].pose
    d_now = math.hypot(adv.x - gx, adv.y - gy)
    d_prev = math.hypot(prev.x - gx, prev.y - gy)
    reached = d_now <= config.radius
    hit_other = any(
        adversary_index in pair and 0 not in pair for pair in collisions
    )
    if config.mode == "intent":
        reward = (d_prev - d_now) + config.bonus * reached - config.bonus * hit_other
    else:
        reward = (d_now - d_prev) + config.bonus * hit_other - config.bonus * reached
    return reward


def conflict_point_goal(config: ScenarioConfig, adversary_index: int) -> tuple[float, float]:
    """Default goal: the ego-route point nearest the adversary spawn."""
    if not (1 <= adversary_index <= len(config.npcs)):
        raise ValueError("adversary_index must point at a non-ego agent")
    route = Route(config.ego.route)
    spawn = config.npcs[adversary_index - 1].spawn
    proj = route.project(spawn[0], spawn[1])
    point = route.point_at(proj.arc_length)
    return float(point[0]), float(point[1])
