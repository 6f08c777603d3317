"""Bicycle dynamics and differentiable unroll tests.

Frozen expectations:
  - straight line at 10 m/s for 0.1 s moves exactly 1.0 m;
  - fixed steer circulates on a circle of radius lr / sin(beta) (1%);
  - hard braking clamps speed at zero, never reverses;
  - d(final x)/d(accel at step k) = (T - k - 0.5) * dt^2 on a straight
    rollout (0.095 for T=10, k=0, dt=0.1), the exact double-integrator
    value;
  - analytic jacobians agree with central finite differences (h = 1e-5)
    to 1e-4 relative error with the denominator floored at 1.
"""

import math

import numpy as np
import pytest

from drivebench.errors import PlanShapeError, StateIntegrityError
from drivebench.sim import (
    Action,
    AgentState,
    KinematicsParams,
    Pose,
    WorldState,
    step_bicycle,
    step_world,
    unroll,
    unroll_with_gradient,
)

PARAMS = KinematicsParams()


def _agent(x=0.0, y=0.0, heading=0.0, speed=0.0) -> AgentState:
    return AgentState(Pose(x, y, heading), speed)


class TestStepBicycle:
    def test_straight_line_frozen_value(self):
        out = step_bicycle(_agent(speed=10.0), Action(0.0, 0.0), PARAMS, 0.1)
        assert out.pose.x == pytest.approx(1.0, abs=1e-12)
        assert out.pose.y == 0.0
        assert out.pose.heading == 0.0
        assert out.speed == 10.0

    def test_speed_floor_no_reversal(self):
        # braking harder than the remaining speed stops the vehicle exactly
        params = KinematicsParams(min_accel=-25.0)
        out = step_bicycle(_agent(speed=1.0), Action(0.0, -20.0), params, 0.1)
        assert out.speed == 0.0
        # and it can never move backwards afterwards
        out2 = step_bicycle(out, Action(0.0, -20.0), params, 0.1)
        assert out2.speed == 0.0
        assert out2.pose.x == out.pose.x

    def test_speed_ceiling(self):
        out = step_bicycle(_agent(speed=14.9), Action(0.0, 3.0), PARAMS, 0.1)
        assert out.speed == PARAMS.max_speed

    def test_turning_radius_oracle(self):
        # fixed steer at constant speed traces a circle of radius lr/sin(beta)
        dt, steer, speed = 0.01, 0.2, 5.0
        beta = PARAMS.slip_angle(steer)
        expected_radius = PARAMS.lr / math.sin(beta)
        agent = _agent(speed=speed)
        n_steps = int(2 * math.pi * expected_radius / (speed * dt)) + 2
        xs, ys = [], []
        for _ in range(n_steps):
            agent = step_bicycle(agent, Action(steer, 0.0), PARAMS, dt)
            xs.append(agent.pose.x)
            ys.append(agent.pose.y)
        cx, cy = np.mean(xs), np.mean(ys)
        radii = np.hypot(np.array(xs) - cx, np.array(ys) - cy)
        assert np.mean(radii) == pytest.approx(expected_radius, rel=0.01)
        assert radii.std() / expected_radius < 0.01

    def test_action_clamped_to_bounds(self):
        out = step_bicycle(_agent(speed=5.0), Action(2.0, 50.0), PARAMS, 0.1)
        ref = step_bicycle(
            _agent(speed=5.0), Action(PARAMS.max_steer, PARAMS.max_accel), PARAMS, 0.1
        )
        assert out == ref

    def test_heading_stays_wrapped(self):
        agent = _agent(heading=3.1, speed=10.0)
        for _ in range(200):
            agent = step_bicycle(agent, Action(0.5, 0.0), PARAMS, 0.1)
            assert -math.pi < agent.pose.heading <= math.pi

    def test_determinism_bit_identical(self):
        a = step_bicycle(_agent(1, 2, 0.3, 7.0), Action(0.1, 0.5), PARAMS, 0.1)
        b = step_bicycle(_agent(1, 2, 0.3, 7.0), Action(0.1, 0.5), PARAMS, 0.1)
        assert a.as_array().tobytes() == b.as_array().tobytes()

    def test_rejects_nonfinite(self):
        with pytest.raises(StateIntegrityError):
            _agent(x=math.nan)
        with pytest.raises(StateIntegrityError):
            Action(math.inf, 0.0)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            step_bicycle(_agent(), Action(0, 0), PARAMS, 0.0)


class TestStepWorld:
    def test_componentwise_equivalence(self):
        world = WorldState(
            agents=(_agent(0, 0, 0, 5.0), _agent(10, 3, 1.0, 7.0)),
            dt=0.1,
        )
        actions = [Action(0.1, 1.0), Action(-0.2, -0.5)]
        stepped = step_world(world, actions)
        for i in range(2):
            solo = step_bicycle(world.agents[i], actions[i], world.params, world.dt)
            assert stepped.agents[i] == solo
        assert stepped.step_index == 1

    def test_action_count_mismatch(self):
        world = WorldState(agents=(_agent(),))
        with pytest.raises(PlanShapeError):
            step_world(world, [Action(0, 0), Action(0, 0)])


def _plan(actions_per_agent):
    return [list(seq) for seq in actions_per_agent]


class TestUnroll:
    def test_composition(self):
        world = WorldState(agents=(_agent(0, 0, 0.2, 6.0),), dt=0.1)
        rng = np.random.default_rng(11)
        actions = [Action(float(s), float(a)) for s, a in rng.uniform(-0.4, 0.4, (8, 2))]
        full = unroll(world, _plan([actions]), 8)
        first = unroll(world, _plan([actions[:3]]), 3)
        second = unroll(first[-1], _plan([actions[3:]]), 5)
        resumed = first[:-1] + second
        assert len(full) == len(resumed) == 9
        for a, b in zip(full, resumed):
            np.testing.assert_array_equal(a.agents[0].as_array(), b.agents[0].as_array())

    def test_ragged_plan_rejected(self):
        world = WorldState(agents=(_agent(), _agent(x=10)))
        with pytest.raises(PlanShapeError):
            unroll(world, [[Action(0, 0)] * 3, [Action(0, 0)] * 2], 3)

    def test_zero_horizon(self):
        world = WorldState(agents=(_agent(),))
        states = unroll(world, [[]], 0)
        assert states == [world]


class TestUnrollGradient:
    def test_accel_column_closed_form(self):
        # straight rollout: d(final x)/d(accel_k) = (T - k - 0.5) dt^2
        T, dt = 10, 0.1
        world = WorldState(agents=(_agent(speed=10.0),), dt=dt)
        plan = _plan([[Action(0.0, 0.0)] * T])
        _, jac = unroll_with_gradient(world, plan, T)
        assert jac.shape == (1, 4, T, 2)
        assert jac[0, 0, 0, 1] == pytest.approx(0.095, abs=1e-12)
        for k in range(T):
            expected = (T - k - 0.5) * dt * dt
            assert jac[0, 0, k, 1] == pytest.approx(expected, abs=1e-12)

    def test_zero_speed_zero_steer_gradient(self):
        # at rest with no accel, steering cannot move the vehicle
        world = WorldState(agents=(_agent(speed=0.0),), dt=0.1)
        plan = _plan([[Action(0.3, 0.0)] * 5])
        _, jac = unroll_with_gradient(world, plan, 5)
        np.testing.assert_allclose(jac[0, 0:2, :, 0], 0.0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        for T in (1, 3, 5, 12):
            world = WorldState(
                agents=(_agent(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.2, 6.0),),
                dt=0.1,
            )
            raw = rng.uniform([-0.3, -2.0], [0.3, 1.5], (T, 2))
            plan = [[Action(float(s), float(a)) for s, a in raw]]
            _, jac = unroll_with_gradient(world, plan, T)
            fd = _fd_jacobian(world, raw, T)
            err = np.abs(jac[0] - fd) / np.maximum(1.0, np.abs(fd))
            assert err.max() <= 1e-4

    def test_multi_agent_blocks_match_single(self):
        rng = np.random.default_rng(9)
        world = WorldState(
            agents=(_agent(0, 0, 0.1, 5.0), _agent(20, 2, -0.4, 8.0)), dt=0.1
        )
        raws = [rng.uniform([-0.3, -2], [0.3, 1.5], (6, 2)) for _ in range(2)]
        plan = [[Action(float(s), float(a)) for s, a in raw] for raw in raws]
        _, jac = unroll_with_gradient(world, plan, 6)
        for i in range(2):
            solo_world = WorldState(agents=(world.agents[i],), dt=0.1)
            _, solo_jac = unroll_with_gradient(solo_world, [plan[i]], 6)
            np.testing.assert_array_equal(jac[i], solo_jac[0])

    def test_clamped_speed_subgradient_zero(self):
        # resting vehicle, braking action: clamp active, accel column zero
        world = WorldState(agents=(_agent(speed=0.0),), dt=0.1)
        plan = _plan([[Action(0.0, -3.0)] * 4])
        _, jac = unroll_with_gradient(world, plan, 4)
        np.testing.assert_allclose(jac[0, :, :, 1], 0.0)


def _fd_jacobian(world: WorldState, raw_plan: np.ndarray, T: int, h: float = 1e-5):
    """Central finite differences of the final state by each action entry."""
    out = np.zeros((4, T, 2))
    for t in range(T):
        for k in range(2):
            for sign in (+1, -1):
                bumped = raw_plan.copy()
                bumped[t, k] += sign * h
                plan = [[Action(float(s), float(a)) for s, a in bumped]]
                final = unroll(world, plan, T)[-1].agents[0].as_array()
                if sign > 0:
                    plus = final
                else:
                    minus = final
            out[:, t, k] = (plus - minus) / (2 * h)
    return out
