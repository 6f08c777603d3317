"""Digital adversarial attacks against a built-in differentiable
victim, plus component-level robustness metrics."""

from .detection_metrics import DetectionBox, ap_at_05, asr, iou
from .gradient_attacks import AttackConfig, cw, fgsm, pgd
from .victim import (
    DiffModel,
    TinyMLP,
    margin_value,
    synthetic_patch_dataset,
    train_tiny_victim,
)

__all__ = [
    "AttackConfig",
    "DetectionBox",
    "DiffModel",
    "TinyMLP",
    "ap_at_05",
    "asr",
    "cw",
    "fgsm",
    "iou",
    "margin_value",
    "pgd",
    "synthetic_patch_dataset",
    "train_tiny_victim",
]
