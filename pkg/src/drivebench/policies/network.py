"""Diagonal-Gaussian MLP policy with hand-written backpropagation.

The network maps an observation to the action mean through tanh hidden
layers; a state-independent log-std vector completes the distribution.
No autograd framework is involved: gradients of the log-density with
respect to every parameter are derived by explicit backprop, which the
tests check against finite differences.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..sim.types import Action

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PolicyParams:
    """Immutable parameter snapshot: per-layer weights/biases + log-std.

    weights[k] has shape (out_k, in_k); the last layer is linear, all
    earlier ones are followed by tanh.
    """

    weights: tuple
    biases: tuple
    log_std: np.ndarray

    def __post_init__(self):
        if len(self.weights) != len(self.biases):
            raise ValueError("weights/biases layer count mismatch")
        for w, b in zip(self.weights, self.biases):
            if w.shape[0] != b.shape[0]:
                raise ValueError("layer width mismatch")
        if self.log_std.shape != (self.weights[-1].shape[0],):
            raise ValueError("log_std must match the action dimension")

    @property
    def obs_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def action_dim(self) -> int:
        return self.weights[-1].shape[0]


def init_policy(
    obs_dim: int = 10,
    hidden: tuple = (64, 64),
    action_dim: int = 2,
    seed: int = 0,
    log_std_init: float = -0.5,
    scale: float = 0.2,
) -> PolicyParams:
    """Random small-weight initialization (Xavier-style scaling)."""
    rng = np.random.default_rng(seed)
    sizes = [obs_dim, *hidden, action_dim]
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.normal(0.0, scale / math.sqrt(n_in), (n_out, n_in)))
        biases.append(np.zeros(n_out))
    return PolicyParams(tuple(weights), tuple(biases), np.full(action_dim, log_std_init))


def zero_policy(obs_dim: int = 10, hidden: tuple = (64, 64), action_dim: int = 2,
                log_std_init: float = 0.0) -> PolicyParams:
    sizes = [obs_dim, *hidden, action_dim]
    weights = tuple(np.zeros((o, i)) for i, o in zip(sizes[:-1], sizes[1:]))
    biases = tuple(np.zeros(o) for o in sizes[1:])
    return PolicyParams(weights, biases, np.full(action_dim, log_std_init))


def forward_mean(params: PolicyParams, obs: np.ndarray):
    """Action mean plus the per-layer activations needed for backprop."""
    activations = [np.asarray(obs, dtype=float)]
    h = activations[0]
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = w @ h + b
        h = z if k == last else np.tanh(z)
        activations.append(h)
    return h, activations


def log_prob(params: PolicyParams, obs: np.ndarray, action_values: np.ndarray) -> float:
    """Log-density of the diagonal Gaussian at a raw (pre-clamp) action."""
    mean, _ = forward_mean(params, obs)
    std = np.exp(params.log_std)
    z = (np.asarray(action_values) - mean) / std
    return float(-0.5 * np.sum(z * z) - np.sum(params.log_std) - 0.5 * len(mean) * LOG_2PI)


def policy_act(
    params: PolicyParams,
    obs: np.ndarray,
    rng: np.random.Generator,
    deterministic: bool = False,
) -> tuple[Action, float]:
    """Sample an action and return it with its log-probability.

    The returned Action holds the raw Gaussian sample; the simulation
    clamps it to the kinematic bounds when applied, and the log-prob
    refers to this pre-clamp sample. ``deterministic`` short-circuits to
    the mean action (log-prob evaluated at the mean).
    """
    mean, _ = forward_mean(params, obs)
    if deterministic:
        sample = mean
    else:
        std = np.exp(params.log_std)
        sample = mean + std * rng.standard_normal(len(mean))
    return Action(float(sample[0]), float(sample[1])), log_prob(params, obs, sample)


@dataclass
class ParamGrads:
    """Gradient container shaped like PolicyParams."""

    weights: list
    biases: list
    log_std: np.ndarray

    @classmethod
    def zeros_like(cls, params: PolicyParams) -> "ParamGrads":
        return cls(
            [np.zeros_like(w) for w in params.weights],
            [np.zeros_like(b) for b in params.biases],
            np.zeros_like(params.log_std),
        )

    def add_scaled(self, other: "ParamGrads", scale: float) -> None:
        for mine, theirs in zip(self.weights, other.weights):
            mine += scale * theirs
        for mine, theirs in zip(self.biases, other.biases):
            mine += scale * theirs
        self.log_std += scale * other.log_std

    def scale(self, factor: float) -> None:
        for w in self.weights:
            w *= factor
        for b in self.biases:
            b *= factor
        self.log_std *= factor

    def norm(self) -> float:
        total = float(np.sum(self.log_std**2))
        for w in self.weights:
            total += float(np.sum(w**2))
        for b in self.biases:
            total += float(np.sum(b**2))
        return math.sqrt(total)

    def is_finite(self) -> bool:
        if not np.isfinite(self.log_std).all():
            return False
        return all(np.isfinite(w).all() for w in self.weights) and all(
            np.isfinite(b).all() for b in self.biases
        )


def grad_log_prob(
    params: PolicyParams, obs: np.ndarray, action_values: np.ndarray
) -> ParamGrads:
    """d log pi(a | s) / d theta by explicit backprop through the MLP."""
    action_values = np.asarray(action_values, dtype=float)
    mean, acts = forward_mean(params, obs)
    std = np.exp(params.log_std)
    z = (action_values - mean) / std
    grads = ParamGrads.zeros_like(params)
    grads.log_std[:] = z * z - 1.0
    delta = z / std  # d logp / d mean
    last = len(params.weights) - 1
    for k in range(last, -1, -1):
        grads.weights[k][:] = np.outer(delta, acts[k])
        grads.biases[k][:] = delta
        if k > 0:
            delta = (params.weights[k].T @ delta) * (1.0 - acts[k] ** 2)
    return grads


def apply_update(params: PolicyParams, grads: ParamGrads, step: float) -> PolicyParams:
    """params + step * grads, as a new immutable snapshot."""
    weights = tuple(w + step * g for w, g in zip(params.weights, grads.weights))
    biases = tuple(b + step * g for b, g in zip(params.biases, grads.biases))
    return PolicyParams(weights, biases, params.log_std + step * grads.log_std)


def params_equal(a: PolicyParams, b: PolicyParams) -> bool:
    if len(a.weights) != len(b.weights):
        return False
    return (
        all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights))
        and all(np.array_equal(x, y) for x, y in zip(a.biases, b.biases))
        and np.array_equal(a.log_std, b.log_std)
    )
