"""Kinematic bicycle dynamics with analytic derivatives.

State order used throughout: (x, y, heading, speed). The step integrates
positions and heading with the clamped midpoint speed, which makes the
straight-line case an exact double integrator, then applies the speed
update. All derivatives are hand-written; clamps contribute a one-sided
subgradient of zero on the clamped side.
"""

import math
from collections.abc import Sequence

import numpy as np

from ..errors import PlanShapeError, StateIntegrityError
from .geometry import wrap_angle
from .types import Action, AgentState, KinematicsParams, Pose, WorldState


def step_bicycle(
    state: AgentState, action: Action, params: KinematicsParams, dt: float
) -> AgentState:
    """Advance one agent by dt seconds under a (clamped) action.

    Args:
        state: current agent state; must be finite.
        action: raw command; clamped to the params box before integration.
        params: bicycle geometry and bounds.
        dt: step length, > 0.

    Returns:
        The new agent state with heading wrapped to (-pi, pi] and speed
        clamped to [0, max_speed].
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    act = params.clamp_action(action)
    beta = params.slip_angle(act.steer)
    v = state.speed
    v_mid = min(params.max_speed, max(0.0, v + 0.5 * act.accel * dt))
    course = state.pose.heading + beta
    x = state.pose.x + v_mid * math.cos(course) * dt
    y = state.pose.y + v_mid * math.sin(course) * dt
    heading = wrap_angle(state.pose.heading + (v_mid / params.lr) * math.sin(beta) * dt)
    speed = min(params.max_speed, max(0.0, v + act.accel * dt))
    if not all(map(math.isfinite, (x, y, heading, speed))):
        raise StateIntegrityError("non-finite state after step")
    return AgentState(Pose(x, y, heading), speed, state.footprint, state.role)


def step_jacobians(
    state: AgentState, action: Action, params: KinematicsParams, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic step derivatives.

    Returns:
        (A, B) with A = d(next state)/d(state), shape (4, 4), and
        B = d(next state)/d(steer, accel), shape (4, 2). Speed clamps use a
        subgradient of 0 on the clamped side; the action-box clamp keeps
        derivative 1 at the exact bound so boundary iterates stay usable.
    """
    act = params.clamp_action(action)
    # closed interval on purpose: projected plans sit exactly on the box
    steer_free = 1.0 if -params.max_steer <= action.steer <= params.max_steer else 0.0
    accel_free = 1.0 if params.min_accel <= action.accel <= params.max_accel else 0.0

    ratio = params.lr / params.wheelbase
    tan_s = math.tan(act.steer)
    u = ratio * tan_s
    # d(beta)/d(steer) through atan(ratio * tan(steer))
    dbeta = ratio * (1.0 + tan_s * tan_s) / (1.0 + u * u) * steer_free
    beta = math.atan(u)

    v = state.speed
    v_mid_raw = v + 0.5 * act.accel * dt
    mid_free = 1.0 if 0.0 < v_mid_raw < params.max_speed else 0.0
    v_mid = min(params.max_speed, max(0.0, v_mid_raw))
    v_raw = v + act.accel * dt
    v_free = 1.0 if 0.0 < v_raw < params.max_speed else 0.0

    course = state.pose.heading + beta
    cos_c, sin_c = math.cos(course), math.sin(course)
    sin_b, cos_b = math.sin(beta), math.cos(beta)

    A = np.eye(4)
    A[0, 2] = -v_mid * sin_c * dt
    A[0, 3] = mid_free * cos_c * dt
    A[1, 2] = v_mid * cos_c * dt
    A[1, 3] = mid_free * sin_c * dt
    A[2, 3] = mid_free * (sin_b / params.lr) * dt
    A[3, 3] = v_free

    B = np.zeros((4, 2))
    B[0, 0] = -v_mid * sin_c * dbeta * dt
    B[1, 0] = v_mid * cos_c * dbeta * dt
    B[2, 0] = (v_mid / params.lr) * cos_b * dbeta * dt
    da_mid = 0.5 * dt * mid_free * accel_free
    B[0, 1] = da_mid * cos_c * dt
    B[1, 1] = da_mid * sin_c * dt
    B[2, 1] = da_mid * (sin_b / params.lr) * dt
    B[3, 1] = v_free * accel_free * dt
    return A, B


def step_world(world: WorldState, actions: Sequence[Action]) -> WorldState:
    """Advance every agent one step. ``actions[i]`` drives ``agents[i]``."""
    if len(actions) != len(world.agents):
        raise PlanShapeError(
            f"got {len(actions)} actions for {len(world.agents)} agents"
        )
    agents = tuple(
        step_bicycle(agent, action, world.params, world.dt)
        for agent, action in zip(world.agents, actions)
    )
    return WorldState(agents, world.step_index + 1, world.dt, world.params)


def _check_plan(world: WorldState, plan: Sequence[Sequence[Action]], horizon: int):
    if horizon < 0:
        raise PlanShapeError("horizon must be non-negative")
    if len(plan) != len(world.agents):
        raise PlanShapeError(
            f"plan covers {len(plan)} agents, world has {len(world.agents)}"
        )
    for i, actions in enumerate(plan):
        if len(actions) != horizon:
            raise PlanShapeError(
                f"agent {i} plan has {len(actions)} actions, expected {horizon}"
            )


def unroll(
    world: WorldState, plan: Sequence[Sequence[Action]], horizon: int
) -> list[WorldState]:
    """Roll the world forward under a fixed per-agent action plan.

    Returns horizon + 1 states, the initial one included. Rejects ragged
    plans. unroll(w, p, a+b) equals unroll over the first a steps followed
    by unroll over the remaining b.
    """
    _check_plan(world, plan, horizon)
    states = [world]
    for t in range(horizon):
        world = step_world(world, [plan[i][t] for i in range(len(plan))])
        states.append(world)
    return states


def unroll_with_gradient(
    world: WorldState, plan: Sequence[Sequence[Action]], horizon: int
) -> tuple[list[WorldState], np.ndarray]:
    """Unroll and differentiate each agent's final state by its own plan.

    Agents do not interact inside the dynamics, so cross-agent derivatives
    vanish and are not materialized.

    Returns:
        (trajectory, jac) where jac has shape (n_agents, 4, horizon, 2):
        jac[i, c, t, k] = d(final state c of agent i) / d(plan[i][t] component k)
        with state order (x, y, heading, speed) and action order
        (steer, accel).
    """
    _check_plan(world, plan, horizon)
    n = len(world.agents)
    jac = np.zeros((n, 4, horizon, 2))
    step_jacs: list[list[tuple[np.ndarray, np.ndarray]]] = [[] for _ in range(n)]
    states = [world]
    for t in range(horizon):
        for i in range(n):
            step_jacs[i].append(
                step_jacobians(world.agents[i], plan[i][t], world.params, world.dt)
            )
        world = step_world(world, [plan[i][t] for i in range(n)])
        states.append(world)
    for i in range(n):
        carry = np.eye(4)
        for t in range(horizon - 1, -1, -1):
            A, B = step_jacs[i][t]
            jac[i, :, t, :] = carry @ B
            carry = carry @ A
    return states, jac


def unroll_single(
    state: AgentState,
    actions: Sequence[Action],
    params: KinematicsParams,
    dt: float,
    with_jacobians: bool = False,
):
    """Unroll one agent in isolation.

    Returns the list of horizon + 1 states, plus the per-step (A, B)
    jacobian pairs when ``with_jacobians`` is set (used by adjoint sweeps
    over trajectory costs).
    """
    states = [state]
    jacs = []
    for action in actions:
        if with_jacobians:
            jacs.append(step_jacobians(state, action, params, dt))
        state = step_bicycle(state, action, params, dt)
        states.append(state)
    if with_jacobians:
        return states, jacs
    return states
