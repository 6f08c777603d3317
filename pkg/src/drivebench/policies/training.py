"""Policy-gradient training: REINFORCE and PPO-clip on collected episodes.

Both updates are plain gradient ascent with hand-derived gradients. The
default advantage is returns-to-go minus a per-timestep mean baseline
across the batch, under which a constant reward cancels exactly and the
parameters do not move.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..sim.types import Action
from .network import (
    ParamGrads,
    PolicyParams,
    apply_update,
    forward_mean,
    grad_log_prob,
    log_prob,
)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 3e-3
    discount: float = 0.99
    batch_size: int = 8
    iterations: int = 200
    baseline: str = "mean-return"  # or "none"
    reward_mode: str = "returns-to-go"  # or "raw"
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must lie in (0, 1]")
        if self.batch_size < 1 or self.iterations < 0:
            raise ValueError("batch_size >= 1 and iterations >= 0 required")
        if self.baseline not in ("mean-return", "none"):
            raise ValueError(f"unknown baseline {self.baseline!r}")
        if self.reward_mode not in ("returns-to-go", "raw"):
            raise ValueError(f"unknown reward_mode {self.reward_mode!r}")


@dataclass(frozen=True)
class PpoConfig(TrainConfig):
    clip_epsilon: float = 0.2
    epochs: int = 4

    def __post_init__(self):
        super().__post_init__()
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ValueError("clip_epsilon must lie in (0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class TrajectoryStep:
    observation: np.ndarray
    action: Action
    log_prob: float
    reward: float


@dataclass(frozen=True)
class EpisodeTrajectory:
    """One episode of (s, a, log pi, r) tuples plus its discounted return."""

    steps: tuple
    discounted_return: float

    @classmethod
    def from_steps(cls, steps, discount: float) -> "EpisodeTrajectory":
        total = 0.0
        for step in reversed(list(steps)):
            total = step.reward + discount * total
        return cls(tuple(steps), total)


@dataclass
class UpdateResult:
    params: PolicyParams
    diagnostics: dict = field(default_factory=dict)


def _step_weights(batch, cfg: TrainConfig) -> list[np.ndarray]:
    """Per-step scalar weights for the log-prob gradients.

    returns-to-go mode computes discounted suffix sums; raw mode uses the
    immediate reward. The mean-return baseline subtracts, at each
    timestep, the mean weight across episodes that reach it.
    """
    per_episode = []
    for ep in batch:
        rewards = np.array([s.reward for s in ep.steps])
        if cfg.reward_mode == "returns-to-go":
            weights = np.zeros_like(rewards)
            acc = 0.0
            for t in range(len(rewards) - 1, -1, -1):
                acc = rewards[t] + cfg.discount * acc
                weights[t] = acc
        else:
            weights = rewards.copy()
        per_episode.append(weights)
    if cfg.baseline == "mean-return" and per_episode:
        longest = max(len(w) for w in per_episode)
        for t in range(longest):
            column = [w[t] for w in per_episode if len(w) > t]
            mean = sum(column) / len(column)
            for w in per_episode:
                if len(w) > t:
                    w[t] -= mean
    return per_episode


def _action_vector(action: Action, dim: int) -> np.ndarray:
    return np.array([action.steer, action.accel])[:dim]


def _batch_gradient(params: PolicyParams, batch, weights) -> tuple[ParamGrads, int]:
    total = ParamGrads.zeros_like(params)
    n_steps = 0
    # overflow here is handled by the finiteness check on the caller side
    with np.errstate(over="ignore", invalid="ignore"):
        for ep, ep_weights in zip(batch, weights):
            for step, w in zip(ep.steps, ep_weights):
                if w == 0.0:
                    n_steps += 1
                    continue
                g = grad_log_prob(
                    params, step.observation, _action_vector(step.action, params.action_dim)
                )
                total.add_scaled(g, float(w))
                n_steps += 1
    if n_steps > 0:
        total.scale(1.0 / n_steps)
    return total, n_steps


def reinforce_update(params: PolicyParams, batch, cfg: TrainConfig) -> UpdateResult:
    """One policy-gradient ascent step over a batch of episodes.

    Empty batches and non-finite gradients leave the parameters unchanged
    and flag the rejection in the diagnostics.
    """
    batch = list(batch)
    if not batch or all(len(ep.steps) == 0 for ep in batch):
        return UpdateResult(params, {"rejected": True, "reason": "empty batch"})
    weights = _step_weights(batch, cfg)
    grads, n_steps = _batch_gradient(params, batch, weights)
    if not grads.is_finite():
        return UpdateResult(params, {"rejected": True, "reason": "non-finite gradient"})
    new_params = apply_update(params, grads, cfg.learning_rate)
    mean_return = sum(ep.discounted_return for ep in batch) / len(batch)
    return UpdateResult(
        new_params,
        {
            "rejected": False,
            "mean_return": mean_return,
            "grad_norm": grads.norm(),
            "n_steps": n_steps,
        },
    )


def _surrogate_and_grad(params: PolicyParams, flat_steps, cfg: PpoConfig, want_grad=True):
    """Clipped surrogate (mean over steps) and its parameter gradient."""
    total = 0.0
    grads = ParamGrads.zeros_like(params) if want_grad else None
    n = len(flat_steps)
    for obs, action_values, old_logp, adv in flat_steps:
        new_logp = log_prob(params, obs, action_values)
        ratio = math.exp(new_logp - old_logp)
        clipped = min(1.0 + cfg.clip_epsilon, max(1.0 - cfg.clip_epsilon, ratio))
        unclipped_term = ratio * adv
        clipped_term = clipped * adv
        total += min(unclipped_term, clipped_term)
        if want_grad and unclipped_term <= clipped_term and adv != 0.0:
            # d surrogate / d new_logp = ratio * adv on the active branch;
            # the clipped branch is flat in theta
            g = grad_log_prob(params, obs, action_values)
            grads.add_scaled(g, ratio * adv)
    total /= max(n, 1)
    if want_grad:
        grads.scale(1.0 / max(n, 1))
    return total, grads


def ppo_clip_update(params: PolicyParams, batch, cfg: PpoConfig) -> UpdateResult:
    """Clipped-surrogate update with several inner epochs.

    The surrogate is measured against the stored behavior log-probs; the
    best-scoring parameter snapshot across epochs (the input included)
    is returned, so the surrogate on the training batch never decreases.
    """
    batch = list(batch)
    if not batch or all(len(ep.steps) == 0 for ep in batch):
        return UpdateResult(params, {"rejected": True, "reason": "empty batch"})
    weights = _step_weights(batch, cfg)
    flat_steps = []
    for ep, ep_weights in zip(batch, weights):
        for step, adv in zip(ep.steps, ep_weights):
            flat_steps.append(
                (
                    step.observation,
                    _action_vector(step.action, params.action_dim),
                    step.log_prob,
                    float(adv),
                )
            )
    initial_surrogate, _ = _surrogate_and_grad(params, flat_steps, cfg, want_grad=False)
    best = (initial_surrogate, params)
    current = params
    for _ in range(cfg.epochs):
        _, grads = _surrogate_and_grad(current, flat_steps, cfg)
        if not grads.is_finite():
            return UpdateResult(
                best[1], {"rejected": True, "reason": "non-finite gradient"}
            )
        current = apply_update(current, grads, cfg.learning_rate)
        score, _ = _surrogate_and_grad(current, flat_steps, cfg, want_grad=False)
        if score > best[0]:
            best = (score, current)
    mean_return = sum(ep.discounted_return for ep in batch) / len(batch)
    return UpdateResult(
        best[1],
        {
            "rejected": False,
            "surrogate_before": initial_surrogate,
            "surrogate_after": best[0],
            "mean_return": mean_return,
        },
    )


def mean_action_probability_above(params: PolicyParams, obs: np.ndarray, component: int = 0,
                                  threshold: float = 0.0) -> float:
    """P(sampled action component > threshold) under the current Gaussian."""
    mean, _ = forward_mean(params, obs)
    std = float(np.exp(params.log_std[component]))
    z = (threshold - float(mean[component])) / std
    return 0.5 * math.erfc(z / math.sqrt(2.0))
