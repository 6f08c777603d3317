"""System-level safety metrics computed from episode logs.

Conventions:
  - collision rate (CR): fraction of episodes in which the ego was part
    of at least one collision pair.
  - off-road distance (OR): arc length the ego covers while any
    footprint corner is off the drivable area, summed as speed * dt
    over every recorded step except the last (no distance accrues
    after the final state).
  - route deviation (DR): time-mean of the ego's absolute lateral
    offset from its route, in meters.
  - route completion (RC): final value of the monotone progress
    envelope, in [0, 1].
"""

from dataclasses import dataclass

from .log import EpisodeLog


@dataclass(frozen=True)
class MetricSet:
    cr: float
    or_meters: float
    dr_meters: float
    rc: float

    def to_json(self) -> dict:
        return {
            "cr": self.cr,
            "or_meters": self.or_meters,
            "dr_meters": self.dr_meters,
            "rc": self.rc,
        }


def compute_cr(logs) -> float:
    logs = list(logs)
    if not logs:
        raise ValueError("compute_cr needs at least one episode")
    hits = sum(1 for log in logs if log.ego_collided())
    return hits / len(logs)


def compute_or(log: EpisodeLog) -> float:
    total = 0.0
    for record in log.records[:-1]:
        if not record.ego_on_road:
            total += record.agents[0][3] * log.dt
    return total


def compute_dr(log: EpisodeLog, half_lane: float | None = None) -> float:
    """Mean absolute lateral offset; divide by `half_lane` to get a
    dimensionless deviation instead of meters."""
    if not log.records:
        raise ValueError("empty episode log")
    mean = sum(abs(r.ego_lateral) for r in log.records) / len(log.records)
    if half_lane is not None:
        mean /= half_lane
    return mean


def compute_rc(log: EpisodeLog) -> float:
    if not log.records:
        raise ValueError("empty episode log")
    return log.records[-1].ego_progress


def episode_metrics(log: EpisodeLog) -> MetricSet:
    """Single-episode metric row; CR degenerates to a 0/1 flag."""
    return MetricSet(
        cr=1.0 if log.ego_collided() else 0.0,
        or_meters=compute_or(log),
        dr_meters=compute_dr(log),
        rc=compute_rc(log),
    )
