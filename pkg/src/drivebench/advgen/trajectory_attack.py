"""Trajectory-space attack on recorded traffic.

Future positions for the non-ego agents are initialized with a
constant-velocity extrapolation of their histories and then pushed, by
accept-if-improved gradient ascent, toward the reacting ego while a
Gaussian plausibility term anchors them to the extrapolation. The ego
reaction is re-simulated every iteration: a route follower is fitted to
the nearest map lane and stepped against the candidate futures, so the
attack cannot exploit a frozen ego path.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..policies.autopilot import AutopilotConfig, autopilot_act
from ..sim.dynamics import step_bicycle
from ..sim.maps import MapModel
from ..sim.routes import Route
from ..sim.types import DEFAULT_PARAMS, AgentState, Pose, WorldState


@dataclass(frozen=True)
class TrajectoryScene:
    """Observed histories plus the future window to attack.

    Histories are (t, 2) position sequences sampled every `dt` seconds;
    all of them must share the same length t >= 2.
    """

    map_model: MapModel
    ego_history: np.ndarray
    npc_histories: tuple
    horizon: int
    dt: float = 0.1

    def __post_init__(self):
        object.__setattr__(
            self, "ego_history", np.asarray(self.ego_history, dtype=float)
        )
        object.__setattr__(
            self,
            "npc_histories",
            tuple(np.asarray(h, dtype=float) for h in self.npc_histories),
        )
        if self.horizon < 1:
            raise ValueError("horizon must be at least one step")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not self.npc_histories:
            raise ValueError("scene needs at least one non-ego history")
        length = len(self.ego_history)
        if length < 2:
            raise ValueError("histories need at least two samples")
        for hist in (self.ego_history, *self.npc_histories):
            if hist.ndim != 2 or hist.shape[1] != 2:
                raise ValueError("histories must be (t, 2) position arrays")
            if len(hist) != length:
                raise ValueError("all histories must share the same length")


@dataclass(frozen=True)
class TrajectoryWeights:
    # defaults let the collision pull beat the anchor on lane-scale
    # deviations while the plausibility limit still recovers the
    # extrapolation exactly
    plausibility: float = 1.0
    collision: float = 20.0
    kappa: float = 1.0  # smooth-min temperature (m)
    sigma: float = 2.0  # extrapolation-anchor scale (m)
    step_size: float = 0.1

    def __post_init__(self):
        if self.plausibility < 0 or self.collision < 0:
            raise ValueError("weights must be non-negative")
        if self.kappa <= 0 or self.sigma <= 0 or self.step_size <= 0:
            raise ValueError("kappa, sigma, and step_size must be positive")


@dataclass
class TrajectoryAttackResult:
    trajectories: np.ndarray  # (n_npc, horizon, 2)
    objective: float
    collision_term: float
    min_distance: float
    initial_objective: float
    ego_future: np.ndarray  # (horizon, 2)
    trace: list = field(default_factory=list)
    aborted: bool = False


def constant_velocity_extrapolation(history, horizon: int) -> np.ndarray:
    """Continue a position history at its last observed velocity."""
    hist = np.asarray(history, dtype=float)
    if hist.ndim != 2 or hist.shape[1] != 2 or len(hist) < 2:
        raise ValueError("history must be a (t, 2) array with t >= 2")
    velocity = hist[-1] - hist[-2]
    steps = np.arange(1, horizon + 1, dtype=float)[:, None]
    return hist[-1] + steps * velocity


def collision_surrogate(ego_future, npc_futures, kappa: float) -> float:
    """Smooth maximum of closeness over the future window.

    Equals log sum over steps of exp(-d_k / kappa) with d_k the distance
    from the ego to the nearest non-ego agent at step k; larger means
    closer to a collision, and the gradient spreads over every step
    instead of only the closest one.
    """
    ego = np.asarray(ego_future, dtype=float)
    npcs = np.asarray(npc_futures, dtype=float)
    dists = np.linalg.norm(npcs - ego[None, :, :], axis=2).min(axis=0)
    z = -dists / kappa
    peak = z.max()
    return float(peak + math.log(np.exp(z - peak).sum()))


def _nearest_lane_route(map_model: MapModel, position, heading: float) -> Route:
    """Lane centerline closest to the position, preferring the ego's
    direction of travel over the oncoming one."""
    best = None
    best_score = math.inf
    for lane in map_model.lanes:
        route = Route(lane)
        proj = route.project(position[0], position[1])
        score = proj.distance + 5.0 * (1.0 - math.cos(heading - proj.tangent_heading))
        if score < best_score:
            best_score = score
            best = route
    if best is None:
        raise ValueError("map has no lanes to follow")
    return best


def simulate_ego_reaction(scene: TrajectoryScene, npc_futures) -> np.ndarray:
    """Step a route-following ego against candidate non-ego futures.

    The ego starts from its last observed position with the heading and
    speed implied by its final displacement, follows the nearest lane,
    and reacts (brakes, keeps headway) to the candidate agents. Returns
    the (horizon, 2) ego positions.
    """
    npcs = np.asarray(npc_futures, dtype=float)
    disp = scene.ego_history[-1] - scene.ego_history[-2]
    travel = float(np.hypot(disp[0], disp[1]))
    if travel == 0.0:
        raise ValueError("ego history has no displacement to estimate a velocity from")
    heading = math.atan2(disp[1], disp[0])
    speed = travel / scene.dt
    route = _nearest_lane_route(scene.map_model, scene.ego_history[-1], heading)
    config = AutopilotConfig(desired_speed=speed)
    state = AgentState(
        pose=Pose(scene.ego_history[-1][0], scene.ego_history[-1][1], heading),
        speed=speed,
    )
    last_observed = np.array([h[-1] for h in scene.npc_histories])
    before_last = np.array([h[-2] for h in scene.npc_histories])
    positions = []
    for k in range(scene.horizon):
        if k == 0:
            now, prev = last_observed, before_last
        elif k == 1:
            now, prev = npcs[:, 0], last_observed
        else:
            now, prev = npcs[:, k - 1], npcs[:, k - 2]
        agents = [state]
        for i in range(len(scene.npc_histories)):
            move = now[i] - prev[i]
            dist = float(np.hypot(move[0], move[1]))
            agents.append(
                AgentState(
                    pose=Pose(
                        now[i][0],
                        now[i][1],
                        math.atan2(move[1], move[0]) if dist > 0 else 0.0,
                    ),
                    speed=dist / scene.dt,
                )
            )
        world = WorldState(agents=tuple(agents), step_index=k, dt=scene.dt)
        action = autopilot_act(world, 0, route, config)
        state = step_bicycle(state, action, DEFAULT_PARAMS, scene.dt)
        positions.append([state.pose.x, state.pose.y])
    return np.array(positions)


def _evaluate(scene, weights, trajectories, anchor):
    ego_future = simulate_ego_reaction(scene, trajectories)
    plausibility = -float(np.sum((trajectories - anchor) ** 2)) / (
        2.0 * weights.sigma**2
    )
    collision = collision_surrogate(ego_future, trajectories, weights.kappa)
    objective = weights.plausibility * plausibility + weights.collision * collision
    min_distance = float(
        np.linalg.norm(trajectories - ego_future[None, :, :], axis=2).min()
    )
    return objective, collision, min_distance, ego_future


def _objective_gradient(scene, weights, trajectories, anchor, ego_future):
    """Ascent direction with the ego future held fixed."""
    grad = -weights.plausibility * (trajectories - anchor) / weights.sigma**2
    diffs = trajectories - ego_future[None, :, :]
    dists = np.linalg.norm(diffs, axis=2)
    nearest = dists.min(axis=0)
    which = dists.argmin(axis=0)
    z = -nearest / weights.kappa
    alpha = np.exp(z - z.max())
    alpha /= alpha.sum()
    for k in range(scene.horizon):
        d = nearest[k]
        if d > 0.0:
            i = which[k]
            grad[i, k] -= (
                weights.collision * alpha[k] / weights.kappa * diffs[i, k] / d
            )
    return grad


def trajectory_attack(
    scene: TrajectoryScene,
    weights: TrajectoryWeights | None = None,
    steps: int = 40,
    trace_path=None,
) -> TrajectoryAttackResult:
    """Optimize non-ego futures toward the reacting ego.

    steps=0 returns the constant-velocity extrapolation unchanged, as
    does a zero collision weight. Accepted objectives never decrease; a
    non-finite gradient aborts with the best futures so far.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if weights is None:
        weights = TrajectoryWeights()
    anchor = np.stack(
        [constant_velocity_extrapolation(h, scene.horizon) for h in scene.npc_histories]
    )
    objective, collision, min_distance, ego_future = _evaluate(
        scene, weights, anchor, anchor
    )
    best = TrajectoryAttackResult(
        trajectories=anchor.copy(),
        objective=objective,
        collision_term=collision,
        min_distance=min_distance,
        initial_objective=objective,
        ego_future=ego_future,
        trace=[],
    )
    step = weights.step_size
    for iteration in range(1, steps + 1):
        grad = _objective_gradient(
            scene, weights, best.trajectories, anchor, best.ego_future
        )
        if not np.all(np.isfinite(grad)):
            best.aborted = True
            break
        candidate = best.trajectories + step * grad
        objective, collision, min_distance, ego_future = _evaluate(
            scene, weights, candidate, anchor
        )
        accepted = objective > best.objective
        best.trace.append(
            {
                "iteration": iteration,
                "objective": objective,
                "min_distance": min_distance,
                "accepted": accepted,
            }
        )
        if accepted:
            best.trajectories = candidate
            best.objective = objective
            best.collision_term = collision
            best.min_distance = min_distance
            best.ego_future = ego_future
            step *= 1.2
        else:
            step *= 0.5
    if trace_path is not None:
        Path(trace_path).write_text(
            "".join(json.dumps(row, sort_keys=True) + "\n" for row in best.trace)
        )
    return best
