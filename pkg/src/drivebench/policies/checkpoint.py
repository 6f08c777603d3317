"""Versioned JSON checkpoints for policy parameters."""

import json
from pathlib import Path

import numpy as np

from ..errors import CheckpointFormatError
from .network import PolicyParams

CHECKPOINT_FORMAT = "drivebench-policy"
CHECKPOINT_VERSION = 1


def save_policy(params: PolicyParams, path) -> None:
    """Write a checkpoint with an explicit shape header."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "shapes": [list(w.shape) for w in params.weights],
        "layers": [
            {"weight": w.tolist(), "bias": b.tolist()}
            for w, b in zip(params.weights, params.biases)
        ],
        "log_std": params.log_std.tolist(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def load_policy(path) -> PolicyParams:
    """Read a checkpoint, validating format, version, and shapes."""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CheckpointFormatError(f"not a valid checkpoint: {exc}") from exc
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointFormatError(f"unexpected format {payload.get('format')!r}")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointFormatError(f"unsupported version {payload.get('version')!r}")
    weights, biases = [], []
    for header, layer in zip(payload["shapes"], payload["layers"]):
        w = np.asarray(layer["weight"], dtype=float)
        b = np.asarray(layer["bias"], dtype=float)
        if list(w.shape) != header:
            raise CheckpointFormatError(
                f"shape header {header} does not match stored weight {list(w.shape)}"
            )
        weights.append(w)
        biases.append(b)
    return PolicyParams(tuple(weights), tuple(biases), np.asarray(payload["log_std"], dtype=float))
