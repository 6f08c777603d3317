"""Driving policies: observations, Gaussian MLP, rule-based autopilot,
and policy-gradient training."""

from .autopilot import DEFAULT_AUTOPILOT, AutopilotConfig, autopilot_act, idm_accel, pure_pursuit_steer
from .checkpoint import load_policy, save_policy
from .network import (
    ParamGrads,
    PolicyParams,
    apply_update,
    forward_mean,
    grad_log_prob,
    init_policy,
    log_prob,
    params_equal,
    policy_act,
    zero_policy,
)
from .observation import CRUISE_SPEED, NO_NEIGHBOR, OBSERVATION_DIM, observe
from .training import (
    EpisodeTrajectory,
    PpoConfig,
    TrainConfig,
    TrajectoryStep,
    UpdateResult,
    mean_action_probability_above,
    ppo_clip_update,
    reinforce_update,
)

__all__ = [
    "AutopilotConfig",
    "CRUISE_SPEED",
    "DEFAULT_AUTOPILOT",
    "EpisodeTrajectory",
    "NO_NEIGHBOR",
    "OBSERVATION_DIM",
    "ParamGrads",
    "PolicyParams",
    "PpoConfig",
    "TrainConfig",
    "TrajectoryStep",
    "UpdateResult",
    "apply_update",
    "autopilot_act",
    "forward_mean",
    "grad_log_prob",
    "idm_accel",
    "init_policy",
    "load_policy",
    "log_prob",
    "mean_action_probability_above",
    "observe",
    "params_equal",
    "policy_act",
    "ppo_clip_update",
    "pure_pursuit_steer",
    "reinforce_update",
    "save_policy",
    "zero_policy",
]
