"""Plan-space gradient attack through the vehicle kinematics.

One agent's action sequence is optimized to bring it as close to the
ego as possible. The loop alternates: simulate the candidate plan in
the closed loop (the ego and every scripted agent react to the new
motion), then take a gradient step through the adversary's own
kinematics with the rest of the episode frozen. Only the lowest-cost
plan seen so far is ever kept, so accepted costs never increase.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..engine import PlanController, run_episode
from ..evaluation.log import EpisodeLog
from ..evaluation.suite import build_ego_controller
from ..scenarios.behaviors import DistanceTrigger, npc_controller
from ..scenarios.config import ego_route, instantiate
from ..sim.dynamics import unroll_single
from ..sim.maps import closest_drivable_point, get_map, point_on_drivable
from ..sim.types import Action
from .policy_adversary import AdversarySpec


@dataclass
class KinematicsAttackResult:
    """Best plan found plus the optimization trace."""

    actions: list
    cost: float
    min_distance: float
    initial_cost: float
    log: EpisodeLog
    trace: list = field(default_factory=list)
    aborted: bool = False


class _RecordingController:
    """Forwards to a controller and appends every action to a sink."""

    def __init__(self, inner, sink):
        self.inner = inner
        self.sink = sink

    def act(self, world, agent_index, rng):
        action = self.inner.act(world, agent_index, rng)
        self.sink.append(action)
        return action


def natural_plan(spec: AdversarySpec, horizon: int | None = None) -> list:
    """Record the actions the agent's scripted behavior takes naturally.

    Trigger swaps on the agent are recorded through, so the plan covers
    the scripted maneuver as well; it is zero-padded to the horizon.
    """
    config = spec.scenario
    world, triggers = instantiate(config)
    map_model = get_map(config.map_name)
    route = ego_route(config)
    if horizon is None:
        horizon = spec.episode_horizon
    sink = []
    controllers = [build_ego_controller(spec.ego, config, route)]
    for npc in config.npcs:
        controllers.append(npc_controller(npc, map_model))
    controllers[spec.adversary_index] = _RecordingController(
        controllers[spec.adversary_index], sink
    )
    armed = []
    for trig in triggers:
        if trig.agent_index == spec.adversary_index:

            def recording_factory(world, index, _inner=trig.factory):
                return _RecordingController(_inner(world, index), sink)

            armed.append(DistanceTrigger(trig.agent_index, trig.distance, recording_factory))
        else:
            armed.append(trig)
    run_episode(
        world, controllers, route, horizon, map_model=map_model, triggers=armed
    )
    while len(sink) < horizon:
        sink.append(Action(0.0, 0.0))
    return sink


def _simulate_plan(spec: AdversarySpec, plan: np.ndarray, horizon: int):
    """Closed-loop episode with the plan replayed on the adversarial
    agent; its own triggers are dropped, every other trigger stays armed.
    Returns (log, initial world)."""
    config = spec.scenario
    world, triggers = instantiate(config)
    map_model = get_map(config.map_name)
    route = ego_route(config)
    controllers = [build_ego_controller(spec.ego, config, route)]
    for npc in config.npcs:
        controllers.append(npc_controller(npc, map_model))
    controllers[spec.adversary_index] = PlanController(
        [Action(float(s), float(a)) for s, a in plan]
    )
    triggers = [t for t in triggers if t.agent_index != spec.adversary_index]
    log = run_episode(
        world, controllers, route, horizon, map_model=map_model, triggers=triggers
    )
    return log, world


def _cost_terms(log: EpisodeLog, adversary_index: int, map_model, offroad_weight: float):
    """(cost, min ego-adversary distance) for one simulated episode.

    The distance term is the closest approach over post-action states;
    the off-road term averages the squared distance from the adversary
    center to the drivable area over the whole episode.
    """
    post = log.records[1:] if len(log.records) > 1 else log.records
    dists = []
    for rec in post:
        ex, ey = rec.agents[0][0], rec.agents[0][1]
        ax, ay = rec.agents[adversary_index][0], rec.agents[adversary_index][1]
        dists.append(math.hypot(ax - ex, ay - ey))
    min_distance = min(dists)
    off_total = 0.0
    for rec in log.records:
        ax, ay = rec.agents[adversary_index][0], rec.agents[adversary_index][1]
        if not point_on_drivable(ax, ay, map_model):
            cx, cy = closest_drivable_point(ax, ay, map_model)
            off_total += (ax - cx) ** 2 + (ay - cy) ** 2
    cost = min_distance + offroad_weight * off_total / len(log.records)
    return float(cost), float(min_distance)


def _plan_gradient(
    spec: AdversarySpec,
    log: EpisodeLog,
    plan: np.ndarray,
    world0,
    map_model,
    offroad_weight: float,
) -> np.ndarray:
    """Cost gradient with respect to the executed plan entries.

    Per-state cost gradients are pushed backward through the analytic
    step jacobians of the adversary's kinematics; the ego trajectory is
    held fixed at the logged episode. Entries past the episode's end
    never executed and get zero gradient.
    """
    adv = spec.adversary_index
    executed = len(log.records) - 1
    grad = np.zeros_like(plan)
    if executed == 0:
        return grad
    actions = [Action(float(s), float(a)) for s, a in plan[:executed]]
    _, jacs = unroll_single(
        world0.agents[adv], actions, world0.params, world0.dt, with_jacobians=True
    )

    dists = []
    for rec in log.records[1:]:
        ex, ey = rec.agents[0][0], rec.agents[0][1]
        ax, ay = rec.agents[adv][0], rec.agents[adv][1]
        dists.append(math.hypot(ax - ex, ay - ey))
    t_star = int(np.argmin(dists))

    # g[t] = d(cost)/d(state_t) over (x, y, heading, speed)
    g = np.zeros((executed + 1, 4))
    if dists[t_star] > 0.0:
        rec = log.records[t_star + 1]
        ex, ey = rec.agents[0][0], rec.agents[0][1]
        ax, ay = rec.agents[adv][0], rec.agents[adv][1]
        g[t_star + 1, 0] += (ax - ex) / dists[t_star]
        g[t_star + 1, 1] += (ay - ey) / dists[t_star]
    off_scale = 2.0 * offroad_weight / len(log.records)
    for t in range(1, executed + 1):
        ax, ay = log.records[t].agents[adv][0], log.records[t].agents[adv][1]
        if not point_on_drivable(ax, ay, map_model):
            cx, cy = closest_drivable_point(ax, ay, map_model)
            g[t, 0] += off_scale * (ax - cx)
            g[t, 1] += off_scale * (ay - cy)

    lam = g[executed]
    grad[executed - 1] = lam @ jacs[executed - 1][1]
    for j in range(executed - 1, 0, -1):
        lam = g[j] + lam @ jacs[j][0]
        grad[j - 1] = lam @ jacs[j - 1][1]
    return grad


def _ego_adversary_collision(log: EpisodeLog, adversary_index: int) -> bool:
    return any(
        pair == (0, adversary_index) for rec in log.records for pair in rec.collisions
    )


def kinematics_attack(
    spec: AdversarySpec,
    initial_plan=None,
    steps: int = 60,
    learning_rate: float = 0.25,
    offroad_weight: float = 1.0,
    trace_path=None,
    stop_on_collision: bool = True,
) -> KinematicsAttackResult:
    """Optimize the adversarial agent's action plan against the ego.

    `initial_plan=None` starts from the agent's natural scripted
    behavior. Descent steps follow the per-channel normalized gradient
    scaled to the action box (steering and acceleration live on very
    different scales), with the step size grown on accepted iterates
    and halved on rejected ones. With stop_on_collision the loop stops
    early once the best plan collides with the ego; a non-finite
    gradient aborts with the best plan so far. The trace holds one row
    per optimization iteration (iteration, cost, min_distance,
    accepted); the starting point lives in initial_cost.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    config = spec.scenario
    map_model = get_map(config.map_name)
    horizon = spec.episode_horizon
    if initial_plan is None:
        initial_plan = natural_plan(spec)
    plan = np.array([[a.steer, a.accel] for a in initial_plan], dtype=float)
    if plan.ndim != 2 or plan.shape[1] != 2 or plan.shape[0] == 0:
        raise ValueError("initial plan must be a non-empty action sequence")

    log, world0 = _simulate_plan(spec, plan, horizon)
    params = world0.params
    lo = np.array([-params.max_steer, params.min_accel])
    hi = np.array([params.max_steer, params.max_accel])
    box_scale = np.array(
        [params.max_steer, 0.5 * (params.max_accel - params.min_accel)]
    )
    cost, min_distance = _cost_terms(log, spec.adversary_index, map_model, offroad_weight)
    best = KinematicsAttackResult(
        actions=[Action(float(s), float(a)) for s, a in plan],
        cost=cost,
        min_distance=min_distance,
        initial_cost=cost,
        log=log,
        trace=[],
    )
    best_plan = plan
    lr = learning_rate
    for iteration in range(1, steps + 1):
        if stop_on_collision and _ego_adversary_collision(best.log, spec.adversary_index):
            break
        grad = _plan_gradient(
            spec, best.log, best_plan, world0, map_model, offroad_weight
        )
        if not np.all(np.isfinite(grad)):
            best.aborted = True
            break
        direction = np.zeros_like(grad)
        for col in range(2):
            peak = np.max(np.abs(grad[:, col]))
            if peak > 0.0:
                direction[:, col] = grad[:, col] / peak
        candidate = np.clip(best_plan - lr * box_scale * direction, lo, hi)
        log, _ = _simulate_plan(spec, candidate, horizon)
        cost, min_distance = _cost_terms(
            log, spec.adversary_index, map_model, offroad_weight
        )
        accepted = cost < best.cost
        best.trace.append(
            {
                "iteration": iteration,
                "cost": cost,
                "min_distance": min_distance,
                "accepted": accepted,
            }
        )
        if accepted:
            best_plan = candidate
            best.actions = [Action(float(s), float(a)) for s, a in candidate]
            best.cost = cost
            best.min_distance = min_distance
            best.log = log
            lr *= 1.2
        else:
            lr *= 0.5
    if trace_path is not None:
        Path(trace_path).write_text(
            "".join(json.dumps(row, sort_keys=True) + "\n" for row in best.trace)
        )
    return best
