"""Safety-critical scenario generation: learned policy adversaries, a
plan-space gradient attack through the kinematics, and a trajectory-space
attack on recorded traffic."""

from .kinematics_attack import (
    KinematicsAttackResult,
    kinematics_attack,
    natural_plan,
)
from .policy_adversary import (
    AdversarySpec,
    AdversaryTrainResult,
    episode_rewards,
    evaluate_adversary,
    run_adversary_episode,
    train_adversary,
)
from .rewards import (
    GoalConfig,
    PursuitWeights,
    conflict_point_goal,
    goal_reward,
    pursuit_reward,
)
from .trajectory_attack import (
    TrajectoryAttackResult,
    TrajectoryScene,
    TrajectoryWeights,
    collision_surrogate,
    constant_velocity_extrapolation,
    simulate_ego_reaction,
    trajectory_attack,
)

__all__ = [
    "AdversarySpec",
    "AdversaryTrainResult",
    "GoalConfig",
    "KinematicsAttackResult",
    "PursuitWeights",
    "TrajectoryAttackResult",
    "TrajectoryScene",
    "TrajectoryWeights",
    "collision_surrogate",
    "conflict_point_goal",
    "constant_velocity_extrapolation",
    "episode_rewards",
    "evaluate_adversary",
    "goal_reward",
    "kinematics_attack",
    "natural_plan",
    "pursuit_reward",
    "run_adversary_episode",
    "simulate_ego_reaction",
    "train_adversary",
    "trajectory_attack",
]
