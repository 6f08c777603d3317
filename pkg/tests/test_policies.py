"""Observation, Gaussian policy, manual backprop, and autopilot tests."""

import math

import numpy as np
import pytest

from drivebench.errors import CheckpointFormatError
from drivebench.policies import (
    AutopilotConfig,
    DEFAULT_AUTOPILOT,
    OBSERVATION_DIM,
    PolicyParams,
    autopilot_act,
    forward_mean,
    grad_log_prob,
    init_policy,
    load_policy,
    log_prob,
    observe,
    params_equal,
    policy_act,
    save_policy,
    zero_policy,
)
from drivebench.sim import AgentState, Pose, Route, WorldState

STRAIGHT = Route([[0.0, 0.0], [100.0, 0.0]])


def _world(*agents, dt=0.1) -> WorldState:
    return WorldState(agents=tuple(agents), dt=dt)


class TestObserve:
    def test_at_rest_on_route(self):
        world = _world(AgentState(Pose(0.0, 0.0, 0.0), 0.0))
        obs = observe(world, 0, STRAIGHT)
        assert obs.shape == (OBSERVATION_DIM,)
        assert obs[0] == 0.0  # heading error
        assert obs[1] == 0.0  # lateral offset
        assert obs[2] == 0.0  # speed
        assert obs[3] == pytest.approx(8.0)  # cruise gap
        assert tuple(obs[4:8]) == (100.0, 0.0, 0.0, 0.0)  # alone: sentinel
        assert obs[8] == pytest.approx(100.0)
        assert obs[9] == 0.0

    def test_neighbor_features_hand_geometry(self):
        # neighbor 10 m ahead, 2 m left, in the frame of an ego heading +x
        me = AgentState(Pose(5.0, 0.0, 0.0), 3.0)
        other = AgentState(Pose(15.0, 2.0, 0.5), 7.0)
        obs = observe(_world(me, other), 0, STRAIGHT)
        assert obs[4] == pytest.approx(10.0)
        assert obs[5] == pytest.approx(2.0)
        assert obs[6] == pytest.approx(4.0)
        assert obs[7] == pytest.approx(0.5)

    def test_frame_rotation(self):
        # ego heading +y: an agent straight ahead appears at +x in its frame
        me = AgentState(Pose(0.0, 0.0, math.pi / 2), 0.0)
        other = AgentState(Pose(0.0, 5.0, math.pi / 2), 0.0)
        obs = observe(_world(me, other), 0, Route([[0, 0], [0, 100]]))
        assert obs[4] == pytest.approx(5.0)
        assert obs[5] == pytest.approx(0.0, abs=1e-12)

    def test_nearest_of_several(self):
        me = AgentState(Pose(0.0, 0.0, 0.0), 0.0)
        near = AgentState(Pose(5.0, 0.0, 0.0), 1.0)
        far = AgentState(Pose(50.0, 0.0, 0.0), 9.0)
        obs = observe(_world(me, near, far), 0, STRAIGHT)
        assert obs[4] == pytest.approx(5.0)
        assert obs[6] == pytest.approx(1.0)

    def test_time_fraction(self):
        world = _world(AgentState(Pose(0, 0, 0), 0.0))
        world = WorldState(world.agents, step_index=30, dt=0.1)
        obs = observe(world, 0, STRAIGHT, horizon=60)
        assert obs[9] == pytest.approx(0.5)


class TestPolicyAct:
    def test_zero_params_deterministic_frozen_values(self):
        params = zero_policy()
        rng = np.random.default_rng(0)
        action, logp = policy_act(params, np.zeros(10), rng, deterministic=True)
        assert (action.steer, action.accel) == (0.0, 0.0)
        # 2-dim standard normal density at its mean
        assert logp == pytest.approx(-math.log(2 * math.pi), abs=1e-12)

    def test_same_seed_same_sample(self):
        params = init_policy(seed=3)
        obs = np.linspace(-1, 1, 10)
        a1, lp1 = policy_act(params, obs, np.random.default_rng(42))
        a2, lp2 = policy_act(params, obs, np.random.default_rng(42))
        assert a1 == a2
        assert lp1 == lp2

    def test_log_prob_round_trip(self):
        params = init_policy(seed=1)
        obs = np.linspace(-0.5, 0.5, 10)
        rng = np.random.default_rng(7)
        for _ in range(20):
            action, logp = policy_act(params, obs, rng)
            re_evaluated = log_prob(params, obs, np.array([action.steer, action.accel]))
            assert logp == pytest.approx(re_evaluated, abs=1e-9)

    def test_sample_mean_matches_network_mean(self):
        params = init_policy(seed=5, log_std_init=-1.0)
        obs = np.full(10, 0.3)
        mean, _ = forward_mean(params, obs)
        rng = np.random.default_rng(11)
        n = 20000
        samples = np.array(
            [policy_act(params, obs, rng)[0].steer for _ in range(n)]
        )
        std = math.exp(-1.0)
        assert samples.mean() == pytest.approx(mean[0], abs=4 * std / math.sqrt(n))

    def test_log_prob_decreases_away_from_mean(self):
        params = zero_policy()
        obs = np.zeros(10)
        at_mean = log_prob(params, obs, np.zeros(2))
        away = log_prob(params, obs, np.array([1.0, -1.0]))
        assert at_mean > away


class TestGradLogProb:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        params = init_policy(obs_dim=6, hidden=(8, 8), action_dim=2, seed=9)
        for _ in range(5):
            obs = rng.uniform(-1, 1, 6)
            action = rng.uniform(-1, 1, 2)
            grads = grad_log_prob(params, obs, action)
            h = 1e-6
            # probe a selection of scalar coordinates in every tensor
            for layer in range(len(params.weights)):
                w = params.weights[layer]
                for idx in [(0, 0), (w.shape[0] - 1, w.shape[1] - 1)]:
                    fd = _fd_param(params, obs, action, ("w", layer, idx), h)
                    got = grads.weights[layer][idx]
                    assert abs(got - fd) <= 1e-5 * max(1.0, abs(fd))
                fd = _fd_param(params, obs, action, ("b", layer, 0), h)
                assert abs(grads.biases[layer][0] - fd) <= 1e-5 * max(1.0, abs(fd))
            for k in range(2):
                fd = _fd_param(params, obs, action, ("s", None, k), h)
                assert abs(grads.log_std[k] - fd) <= 1e-5 * max(1.0, abs(fd))

    def test_gradient_zero_at_mean_for_mean_params(self):
        params = zero_policy()
        grads = grad_log_prob(params, np.zeros(10), np.zeros(2))
        assert all(np.allclose(w, 0) for w in grads.weights)
        # d/d log_std of logp at the mean is -1 per dimension
        np.testing.assert_allclose(grads.log_std, -1.0)


def _fd_param(params: PolicyParams, obs, action, which, h):
    kind, layer, idx = which

    def perturbed(sign):
        weights = [w.copy() for w in params.weights]
        biases = [b.copy() for b in params.biases]
        log_std = params.log_std.copy()
        if kind == "w":
            weights[layer][idx] += sign * h
        elif kind == "b":
            biases[layer][idx] += sign * h
        else:
            log_std[idx] += sign * h
        p = PolicyParams(tuple(weights), tuple(biases), log_std)
        return log_prob(p, obs, action)

    return (perturbed(+1) - perturbed(-1)) / (2 * h)


class TestAutopilot:
    def test_equilibrium_exact_zero(self):
        world = _world(AgentState(Pose(10.0, 0.0, 0.0), 8.0))
        action = autopilot_act(world, 0, STRAIGHT)
        assert action.steer == 0.0
        assert action.accel == 0.0

    def test_full_brake_behind_stopped_leader(self):
        # leader 5 m ahead center-to-center, stopped: IDM saturates at a_min
        me = AgentState(Pose(0.0, 0.0, 0.0), 8.0)
        leader = AgentState(Pose(5.0, 0.0, 0.0), 0.0)
        world = _world(me, leader)
        action = autopilot_act(world, 0, STRAIGHT)
        assert action.accel == world.params.min_accel

    def test_idm_hand_arithmetic_moderate_gap(self):
        # hand-evaluated IDM: v=8, leader at 40 m (gap 35.5) also at 8 m/s
        me = AgentState(Pose(0.0, 0.0, 0.0), 8.0)
        leader = AgentState(Pose(40.0, 0.0, 0.0), 8.0)
        world = _world(me, leader)
        cfg = DEFAULT_AUTOPILOT
        desired_gap = cfg.min_gap + 8.0 * cfg.time_headway  # dv = 0
        expected = cfg.accel_gain * (1.0 - 1.0 - (desired_gap / 35.5) ** 2)
        action = autopilot_act(world, 0, STRAIGHT)
        assert action.accel == pytest.approx(expected, abs=1e-12)

    def test_offset_steers_back_toward_route(self):
        world = _world(AgentState(Pose(0.0, 1.0, 0.0), 0.0))
        action = autopilot_act(world, 0, STRAIGHT)
        # hand-evaluated pure pursuit: lookahead 3, target (3, 0)
        alpha = math.atan2(-1.0, 3.0)
        expected = math.atan2(2 * 2.5 * math.sin(alpha), 3.0)
        assert action.steer < 0
        assert action.steer == pytest.approx(expected, abs=1e-12)

    def test_missing_route_zero_action(self):
        world = _world(AgentState(Pose(0.0, 0.0, 0.0), 5.0))
        action = autopilot_act(world, 0, None)
        assert (action.steer, action.accel) == (0.0, 0.0)

    def test_oncoming_car_not_a_leader(self):
        # oncoming traffic in the adjacent lane must not trigger braking
        me = AgentState(Pose(0.0, 0.0, 0.0), 8.0)
        oncoming = AgentState(Pose(30.0, 3.5, math.pi), 8.0)
        action = autopilot_act(_world(me, oncoming), 0, STRAIGHT)
        assert action.accel == 0.0

    def test_speed_limited_lookahead(self):
        cfg = AutopilotConfig()
        world = _world(AgentState(Pose(0.0, 0.0, 0.0), 12.0))
        # at speed, lookahead = 1.5 v = 18 m; steering stays mild for a
        # small offset
        world_offset = _world(AgentState(Pose(0.0, 0.5, 0.0), 12.0))
        a_centered = autopilot_act(world, 0, STRAIGHT, cfg)
        a_offset = autopilot_act(world_offset, 0, STRAIGHT, cfg)
        assert a_centered.steer == 0.0
        assert 0 < abs(a_offset.steer) < 0.2


class TestCheckpoint:
    def test_round_trip_exact(self, tmp_path):
        params = init_policy(seed=13)
        path = tmp_path / "policy.json"
        save_policy(params, path)
        loaded = load_policy(path)
        assert params_equal(params, loaded)

    def test_malformed_file_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(CheckpointFormatError):
            load_policy(path)

    def test_wrong_format_rejected(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"format": "something-else", "version": 1}')
        with pytest.raises(CheckpointFormatError):
            load_policy(path)

    def test_shape_header_mismatch_rejected(self, tmp_path):
        params = init_policy(obs_dim=4, hidden=(5,), action_dim=2, seed=0)
        path = tmp_path / "policy.json"
        save_policy(params, path)
        import json

        payload = json.loads(path.read_text())
        payload["shapes"][0] = [99, 99]
        path.write_text(json.dumps(payload))
        with pytest.raises(CheckpointFormatError):
            load_policy(path)
