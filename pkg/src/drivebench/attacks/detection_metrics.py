"""Component-level robustness metrics for detection outputs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

IOU_THRESHOLD = 0.5


@dataclass(frozen=True)
class DetectionBox:
    """Axis-aligned detection with a class id and confidence score."""

    class_id: int
    score: float
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if not self.x2 > self.x1:
            raise ValueError("x2 must exceed x1")
        if not self.y2 > self.y1:
            raise ValueError("y2 must exceed y1")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("score must lie in [0, 1]")

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


def iou(a: DetectionBox, b: DetectionBox) -> float:
    """Intersection over union of two boxes."""
    width = min(a.x2, b.x2) - max(a.x1, b.x1)
    height = min(a.y2, b.y2) - max(a.y1, b.y1)
    if width <= 0.0 or height <= 0.0:
        return 0.0
    inter = width * height
    return inter / (a.area + b.area - inter)


def _match_flags(detections, ground_truth):
    """Greedy score-ordered matching; one ground-truth box per match.

    Detections must already be sorted by descending score. Returns a
    0/1 true-positive flag per detection.
    """
    taken = [False] * len(ground_truth)
    flags = np.zeros(len(detections))
    for i, det in enumerate(detections):
        best_iou = 0.0
        best_j = -1
        for j, gt in enumerate(ground_truth):
            if taken[j]:
                continue
            value = iou(det, gt)
            if value > best_iou:
                best_iou = value
                best_j = j
        if best_j >= 0 and best_iou >= IOU_THRESHOLD:
            taken[best_j] = True
            flags[i] = 1.0
    return flags


def ap_at_05(detections, ground_truth) -> dict[int, float | None]:
    """Average precision at IoU 0.5, per class.

    Precision-recall points come from greedy score-sorted matching; the
    area under the curve uses all-point interpolation (each recall step
    weighted by the best precision at or beyond it). Classes that have
    detections but no ground truth get None, since precision without
    positives is undefined rather than zero.
    """
    classes = sorted(
        {box.class_id for box in detections} | {box.class_id for box in ground_truth}
    )
    result: dict[int, float | None] = {}
    for cls in classes:
        gts = [box for box in ground_truth if box.class_id == cls]
        dets = [box for box in detections if box.class_id == cls]
        if not gts:
            result[cls] = None
            continue
        scores = np.array([d.score for d in dets])
        order = np.argsort(-scores, kind="stable")
        dets = [dets[i] for i in order]
        flags = _match_flags(dets, gts)
        true_pos = np.cumsum(flags)
        seen = np.arange(1, len(dets) + 1)
        recall = true_pos / len(gts)
        precision = true_pos / seen
        padded_recall = np.concatenate(([0.0], recall))
        padded_precision = np.concatenate(([0.0], precision))
        envelope = np.maximum.accumulate(padded_precision[::-1])[::-1]
        steps = padded_recall[1:] - padded_recall[:-1]
        result[cls] = float(np.sum(steps * envelope[1:]))
    return result


def asr(benign_count, adversarial_count) -> float:
    """Attack success rate: the fraction of benign detections removed."""
    if benign_count <= 0:
        raise ValueError("benign_count must be positive")
    return (benign_count - adversarial_count) / benign_count
