"""Differentiable victim models for gradient-based input attacks.

The testbed attacks a small classifier rather than a full perception
stack, so the victim contract is deliberately minimal: logits out,
input gradients in closed form. Backpropagation is written by hand and
checked against finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

LOSS_KINDS = ("cross-entropy", "margin")


class DiffModel(Protocol):
    """Classifier exposing logits and exact input gradients."""

    def forward(self, x: np.ndarray) -> np.ndarray: ...

    def input_gradient(
        self, x: np.ndarray, label: int, loss: str = "cross-entropy"
    ) -> np.ndarray: ...


def _softmax(logits):
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def margin_value(model: DiffModel, x: np.ndarray, label: int) -> float:
    """Logit margin of the labeled class over the best other class.

    Negative means the model no longer ranks `label` first.
    """
    logits = np.asarray(model.forward(x), dtype=float)
    others = np.delete(logits, label)
    return float(logits[label] - others.max())


@dataclass
class TinyMLP:
    """Fully connected tanh network with hand-rolled backprop.

    Layer sizes are [input_dim, *hidden, num_classes]. `forward` accepts
    a single flat input or a batch and returns logits of matching rank.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def init(cls, input_dim, num_classes, hidden=(32, 32), seed=0):
        rng = np.random.default_rng(seed)
        sizes = (int(input_dim), *(int(h) for h in hidden), int(num_classes))
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            scale = np.sqrt(2.0 / (fan_in + fan_out))
            weights.append(rng.normal(0.0, scale, (fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def num_classes(self) -> int:
        return self.weights[-1].shape[1]

    def _forward_cached(self, batch):
        """Forward pass keeping post-activation values for backprop."""
        activations = [batch]
        h = batch
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.tanh(h @ w + b)
            activations.append(h)
        logits = h @ self.weights[-1] + self.biases[-1]
        return logits, activations

    def forward(self, x):
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        logits, _ = self._forward_cached(np.atleast_2d(arr))
        return logits[0] if single else logits

    def _backprop_input(self, x, delta_logits):
        """Pull a logit-space gradient back to the input of one sample."""
        logits, activations = self._forward_cached(x[None, :])
        del logits
        delta = delta_logits[None, :]
        for w, h in zip(self.weights[::-1], activations[::-1]):
            if h is activations[0]:
                return (delta @ w.T)[0]
            delta = (delta @ w.T) * (1.0 - h * h)
        raise AssertionError("unreachable")

    def input_gradient(self, x, label, loss="cross-entropy"):
        """Gradient of the chosen loss at `x` w.r.t. the input.

        "cross-entropy" is the training loss; "margin" is the raw logit
        margin of `label` over the runner-up class, the quantity a
        margin-based attack drives negative.
        """
        if loss not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind: {loss!r}")
        arr = np.asarray(x, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.input_dim:
            raise ValueError("input_gradient expects a single flat input")
        label = int(label)
        if not 0 <= label < self.num_classes:
            raise ValueError(f"label {label} out of range")
        logits = self.forward(arr)
        if loss == "cross-entropy":
            delta = _softmax(logits)
            delta[label] -= 1.0
        else:
            others = np.delete(logits, label)
            runner_up = int(np.argmax(others))
            if runner_up >= label:
                runner_up += 1
            delta = np.zeros(self.num_classes)
            delta[label] = 1.0
            delta[runner_up] = -1.0
        return self._backprop_input(arr, delta)

    def loss_and_param_gradients(self, batch, labels):
        """Mean cross-entropy over a batch plus weight and bias gradients."""
        batch = np.asarray(batch, dtype=float)
        labels = np.asarray(labels, dtype=int)
        n = batch.shape[0]
        logits, activations = self._forward_cached(batch)
        probs = _softmax(logits)
        loss = float(-np.mean(np.log(probs[np.arange(n), labels] + 1e-12)))
        delta = probs
        delta[np.arange(n), labels] -= 1.0
        delta /= n
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        for layer in range(len(self.weights) - 1, -1, -1):
            h = activations[layer]
            grads_w[layer] = h.T @ delta
            grads_b[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights[layer].T) * (1.0 - h * h)
        return loss, grads_w, grads_b

    def accuracy(self, batch, labels):
        preds = np.argmax(self.forward(np.asarray(batch, dtype=float)), axis=1)
        return float(np.mean(preds == np.asarray(labels)))


class _Adam:
    """Adam over a flat list of parameter arrays."""

    def __init__(self, params, learning_rate, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / (1.0 - self.beta1**self.t)
            v_hat = self.v[i] / (1.0 - self.beta2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def synthetic_patch_dataset(count, seed=0, size=8, noise=0.10, amplitude=0.055, patch=4):
    """Two-class raster toy set with two patch slots over uniform noise.

    A dim square patch may light up in the top half, the bottom half,
    both, or neither; the label is 1 when exactly one slot is lit. The
    parity structure bends the decision boundary, so a one-shot signed
    step overshoots where an iterated attack corrects course. Amplitude
    and noise are calibrated so the classes separate cleanly while
    perturbations of a few gray levels per pixel still flip them.
    Pixel values stay in [0, 1]. Returns (inputs of shape
    (count, size*size), labels of shape (count,)).
    """
    if patch > size:
        raise ValueError("patch must fit inside the raster")
    rng = np.random.default_rng(seed)
    images = rng.uniform(0.0, noise, (count, size, size))
    slots = rng.integers(0, 4, count)
    top_cols = rng.integers(0, size - patch + 1, count)
    bottom_cols = rng.integers(0, size - patch + 1, count)
    labels = np.where((slots == 1) | (slots == 2), 1, 0)
    for i in range(count):
        if slots[i] in (1, 3):
            col = top_cols[i]
            images[i, 0:patch, col : col + patch] += amplitude
        if slots[i] in (2, 3):
            col = bottom_cols[i]
            images[i, size - patch : size, col : col + patch] += amplitude
    return images.reshape(count, -1), labels


def train_tiny_victim(
    inputs,
    labels,
    epochs=120,
    batch_size=32,
    learning_rate=0.01,
    hidden=(32, 32),
    seed=0,
):
    """Train a TinyMLP classifier with Adam on (inputs, labels).

    Zero epochs returns the untouched initialization. Training is
    deterministic for a fixed seed.
    """
    inputs = np.asarray(inputs, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if inputs.ndim != 2 or inputs.shape[0] != labels.shape[0]:
        raise ValueError("inputs must be (n, d) with one label per row")
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    num_classes = int(labels.max()) + 1 if labels.size else 2
    model = TinyMLP.init(inputs.shape[1], num_classes, hidden=hidden, seed=seed)
    if epochs == 0:
        return model
    shuffle_rng = np.random.default_rng([seed, 1])
    params = model.weights + model.biases
    optimizer = _Adam(params, learning_rate)
    n = inputs.shape[0]
    for _ in range(epochs):
        order = shuffle_rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            _, grads_w, grads_b = model.loss_and_param_gradients(
                inputs[idx], labels[idx]
            )
            optimizer.step(params, grads_w + grads_b)
    return model
