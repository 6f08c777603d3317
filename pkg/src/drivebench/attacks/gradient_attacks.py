"""Norm-bounded digital attacks on differentiable victims.

All three attacks perturb a flat input within an L-infinity ball of
radius epsilon, intersected with the unit box. Inputs are expected in
[0, 1]; epsilon is therefore in normalized units (a budget of 5 gray
levels on a 0..255 scale is 5/255, about 0.0196).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .victim import DiffModel, margin_value


@dataclass(frozen=True)
class AttackConfig:
    """Shared attack knobs.

    step_size None resolves to 2.5 * epsilon / steps, which walks the
    ball diameter with room to spare. cw_margin is the confidence floor
    of the margin objective; cw_binary_search_steps refines the radius
    of a successful margin attack downward.
    """

    epsilon: float = 8.0 / 255.0
    steps: int = 10
    step_size: float | None = None
    random_start: bool = False
    cw_margin: float = 0.0
    cw_binary_search_steps: int = 0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.step_size is not None and self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.cw_margin < 0:
            raise ValueError("cw_margin must be >= 0")
        if self.cw_binary_search_steps < 0:
            raise ValueError("cw_binary_search_steps must be >= 0")

    def resolved_step(self, radius=None):
        if self.step_size is not None:
            return self.step_size
        radius = self.epsilon if radius is None else radius
        return 2.5 * radius / self.steps


def _checked_gradient(model, x, label, loss):
    grad = np.asarray(model.input_gradient(x, label, loss), dtype=float)
    if not np.all(np.isfinite(grad)):
        raise ValueError("victim returned a non-finite input gradient")
    return grad


def _project(candidate, origin, radius):
    """Project onto the radius ball around origin, then the unit box."""
    clipped = np.clip(candidate, origin - radius, origin + radius)
    return np.clip(clipped, 0.0, 1.0)


def fgsm(model: DiffModel, x, label, epsilon):
    """Single signed-gradient step on the cross-entropy loss."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    x = np.asarray(x, dtype=float)
    if epsilon == 0:
        return x.copy()
    grad = _checked_gradient(model, x, label, "cross-entropy")
    return _project(x + epsilon * np.sign(grad), x, epsilon)


def pgd(model: DiffModel, x, label, config: AttackConfig, rng=None):
    """Iterated signed-gradient ascent with ball projection.

    With steps=1, step_size=epsilon, and no random start this reduces
    to fgsm exactly. The optional random start draws Gaussian noise and
    projects it into the ball before the first step.
    """
    x = np.asarray(x, dtype=float)
    if config.epsilon == 0:
        return x.copy()
    step = config.resolved_step()
    current = x
    if config.random_start:
        rng = np.random.default_rng(0) if rng is None else rng
        current = _project(
            x + rng.normal(0.0, config.epsilon, x.shape), x, config.epsilon
        )
    for _ in range(config.steps):
        grad = _checked_gradient(model, current, label, "cross-entropy")
        current = _project(current + step * np.sign(grad), x, config.epsilon)
    return current


def _margin_descent(model, x, label, config, radius):
    """Drive the logit margin down inside a fixed-radius ball.

    Returns the iterate with the lowest margin seen. Stops early once
    the margin reaches the -cw_margin floor, where the clamped
    objective goes flat.
    """
    current = x.copy()
    best = current
    best_margin = margin_value(model, current, label)
    step = config.resolved_step(radius)
    for _ in range(config.steps):
        if best_margin <= -config.cw_margin:
            break
        grad = _checked_gradient(model, current, label, "margin")
        current = _project(current - step * np.sign(grad), x, radius)
        margin = margin_value(model, current, label)
        if margin < best_margin:
            best_margin = margin
            best = current
    return best, best_margin


def cw(model: DiffModel, x, label, config: AttackConfig):
    """Margin attack: projected descent on the runner-up logit margin.

    Runs at the full epsilon radius first. When that flips the label
    and cw_binary_search_steps > 0, binary-searches the smallest radius
    that still flips it and returns that smaller perturbation.
    """
    x = np.asarray(x, dtype=float)
    if config.epsilon == 0:
        return x.copy()
    best, best_margin = _margin_descent(model, x, label, config, config.epsilon)
    if best_margin >= 0 or config.cw_binary_search_steps == 0:
        return best
    low, high = 0.0, config.epsilon
    for _ in range(config.cw_binary_search_steps):
        mid = 0.5 * (low + high)
        candidate, margin = _margin_descent(model, x, label, config, mid)
        if margin < 0:
            high = mid
            best = candidate
        else:
            low = mid
    return best
