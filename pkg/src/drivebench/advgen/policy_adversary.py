"""Training loop that turns one scenario agent into a learned adversary.

The ego controller stays frozen; the chosen agent is driven by a
Gaussian policy whose episodes are scored post hoc with an adversarial
reward, then updated with a policy-gradient step. Any trigger watching
the adversarial agent is disarmed, since the policy replaces its
scripted behavior outright.
"""

from dataclasses import dataclass, field

import numpy as np

from ..engine import PolicyController, run_episode
from ..evaluation.log import EpisodeLog
from ..evaluation.suite import build_ego_controller
from ..policies.network import PolicyParams, init_policy
from ..policies.training import (
    EpisodeTrajectory,
    PpoConfig,
    TrainConfig,
    TrajectoryStep,
    ppo_clip_update,
    reinforce_update,
)
from ..scenarios.behaviors import npc_controller
from ..scenarios.config import ScenarioConfig, ego_route, instantiate
from ..sim.maps import get_map
from ..sim.routes import Route
from ..sim.types import AgentRole, AgentState, Pose, WorldState
from .rewards import GoalConfig, PursuitWeights, conflict_point_goal, goal_reward, pursuit_reward


@dataclass(frozen=True)
class AdversarySpec:
    """Which agent of which scenario becomes adversarial, against what ego."""

    scenario: ScenarioConfig
    adversary_index: int = 1  # agent index; 0 is always the ego
    ego: object = "autopilot"  # "autopilot" or PolicyParams
    horizon: int | None = None
    reward: str = "pursuit"  # or "goal"
    pursuit: PursuitWeights = field(default_factory=PursuitWeights)
    goal: GoalConfig | None = None

    def __post_init__(self):
        if self.adversary_index < 1:
            raise ValueError("adversary_index must be >= 1 (agent 0 is the ego)")
        if self.adversary_index > len(self.scenario.npcs):
            raise ValueError("adversary_index beyond the scenario's agents")
        if self.reward not in ("pursuit", "goal"):
            raise ValueError("reward must be 'pursuit' or 'goal'")

    @property
    def episode_horizon(self) -> int:
        return self.horizon if self.horizon is not None else self.scenario.horizon

    def goal_config(self) -> GoalConfig:
        if self.goal is not None:
            return self.goal
        return GoalConfig(goal=conflict_point_goal(self.scenario, self.adversary_index))


@dataclass
class AdversaryTrainResult:
    params: PolicyParams
    history: list


def _adversary_route(spec: AdversarySpec) -> Route:
    npc = spec.scenario.npcs[spec.adversary_index - 1]
    if npc.route is not None:
        return Route(npc.route)
    return ego_route(spec.scenario)


def run_adversary_episode(
    spec: AdversarySpec,
    params: PolicyParams | None,
    rng: np.random.Generator,
    record: bool = False,
    seed: int = 0,
):
    """One episode; `params=None` leaves the agent on its natural
    scripted behavior (triggers armed). Returns (log, controller)."""
    config = spec.scenario
    world, triggers = instantiate(config)
    map_model = get_map(config.map_name)
    route = ego_route(config)
    horizon = spec.episode_horizon
    controllers = [build_ego_controller(spec.ego, config, route)]
    for npc in config.npcs:
        controllers.append(npc_controller(npc, map_model))
    adversary_ctrl = None
    if params is not None:
        adversary_ctrl = PolicyController(
            params, _adversary_route(spec), horizon, record=record
        )
        controllers[spec.adversary_index] = adversary_ctrl
        triggers = [t for t in triggers if t.agent_index != spec.adversary_index]
    log = run_episode(
        world,
        controllers,
        route,
        horizon,
        map_model=map_model,
        triggers=triggers,
        rng=rng,
        scenario_id=config.scenario_id,
        seed=seed,
    )
    return log, adversary_ctrl


def _world_at(log: EpisodeLog, t: int, dt: float) -> WorldState:
    agents = []
    for i, (x, y, heading, speed) in enumerate(log.records[t].agents):
        agents.append(
            AgentState(
                pose=Pose(x, y, heading),
                speed=speed,
                footprint=log.footprints[i],
                role=AgentRole(log.roles[i]),
            )
        )
    return WorldState(agents=tuple(agents), step_index=t, dt=dt)


def episode_rewards(spec: AdversarySpec, log: EpisodeLog) -> list:
    """Per-action rewards: the action at step t is scored on the state
    it produced at t + 1."""
    map_model = get_map(spec.scenario.map_name)
    rewards = []
    if spec.reward == "goal":
        goal_cfg = spec.goal_config()
    prev = _world_at(log, 0, log.dt)
    for t in range(1, len(log.records)):
        world = _world_at(log, t, log.dt)
        if spec.reward == "pursuit":
            rewards.append(
                pursuit_reward(world, map_model, spec.adversary_index, spec.pursuit)
            )
        else:
            rewards.append(
                goal_reward(
                    world,
                    prev,
                    log.records[t].collisions,
                    spec.adversary_index,
                    goal_cfg,
                )
            )
        prev = world
    return rewards


def _episode_trajectory(spec: AdversarySpec, log, trace, discount: float):
    rewards = episode_rewards(spec, log)
    steps = [
        TrajectoryStep(observation=obs, action=action, log_prob=logp, reward=r)
        for (obs, action, logp), r in zip(trace, rewards)
    ]
    return EpisodeTrajectory.from_steps(steps, discount), sum(rewards)


def train_adversary(
    spec: AdversarySpec,
    cfg: TrainConfig,
    algo: str = "reinforce",
    init: PolicyParams | None = None,
) -> AdversaryTrainResult:
    """Train the adversarial agent's policy against the frozen ego.

    Deterministic given cfg.seed. The history holds one row per
    iteration: mean episode reward and the fraction of batch episodes
    in which the ego collided.
    """
    if algo not in ("reinforce", "ppo"):
        raise ValueError("algo must be 'reinforce' or 'ppo'")
    if algo == "ppo" and not isinstance(cfg, PpoConfig):
        raise ValueError("ppo training needs a PpoConfig")
    params = init if init is not None else init_policy(seed=cfg.seed)
    history = []
    for iteration in range(cfg.iterations):
        batch = []
        totals = []
        ego_hits = 0
        for episode in range(cfg.batch_size):
            rng = np.random.default_rng([cfg.seed, iteration, episode])
            log, ctrl = run_adversary_episode(spec, params, rng, record=True)
            traj, total = _episode_trajectory(spec, log, ctrl.trace, cfg.discount)
            batch.append(traj)
            totals.append(total)
            ego_hits += 1 if log.ego_collided() else 0
        history.append(
            {
                "iteration": iteration,
                "mean_reward": float(np.mean(totals)),
                "ego_collision_freq": ego_hits / cfg.batch_size,
            }
        )
        if algo == "reinforce":
            update = reinforce_update(params, batch, cfg)
        else:
            update = ppo_clip_update(params, batch, cfg)
        params = update.params
    return AdversaryTrainResult(params=params, history=history)


def evaluate_adversary(
    spec: AdversarySpec, params: PolicyParams | None, seeds
) -> float:
    """Ego collision frequency over evaluation seeds."""
    seeds = list(seeds)
    hits = 0
    for seed in seeds:
        rng = np.random.default_rng([int(seed), 0x5EED])
        log, _ = run_adversary_episode(spec, params, rng, seed=int(seed))
        hits += 1 if log.ego_collided() else 0
    return hits / len(seeds)
