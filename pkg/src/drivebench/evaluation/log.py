"""Episode logs and their JSON-lines serialization."""

import json
from dataclasses import dataclass, field
from pathlib import Path

TERMINATIONS = ("collision", "route-complete", "stuck", "timeout")


@dataclass(frozen=True)
class StepRecord:
    """Per-step snapshot used by the metrics.

    ``agents`` holds (x, y, heading, speed) per agent. ``ego_progress``
    is the monotone progress envelope (never decreases along an episode),
    ``collisions`` the overlapping index pairs at this state.
    """

    step_index: int
    agents: tuple
    ego_on_road: bool
    ego_progress: float
    ego_lateral: float
    collisions: tuple


@dataclass
class EpisodeLog:
    scenario_id: str
    seed: int
    dt: float
    horizon: int
    roles: tuple
    footprints: tuple
    records: list = field(default_factory=list)
    termination: str = "timeout"

    def ego_collided(self) -> bool:
        return any(0 in pair for rec in self.records for pair in rec.collisions)


def write_episode_jsonl(log: EpisodeLog, path) -> None:
    """One header line, one line per step, one trailer line."""
    lines = [
        json.dumps(
            {
                "kind": "header",
                "scenario_id": log.scenario_id,
                "seed": log.seed,
                "dt": log.dt,
                "horizon": log.horizon,
                "roles": list(log.roles),
                "footprints": [list(fp) for fp in log.footprints],
            },
            sort_keys=True,
        )
    ]
    for rec in log.records:
        lines.append(
            json.dumps(
                {
                    "kind": "step",
                    "t": rec.step_index,
                    "agents": [list(a) for a in rec.agents],
                    "on_road": rec.ego_on_road,
                    "progress": rec.ego_progress,
                    "lateral": rec.ego_lateral,
                    "collisions": [list(p) for p in rec.collisions],
                },
                sort_keys=True,
            )
        )
    lines.append(json.dumps({"kind": "end", "termination": log.termination}, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n")


def read_episode_jsonl(path) -> EpisodeLog:
    lines = [json.loads(line) for line in Path(path).read_text().splitlines() if line]
    if not lines or lines[0].get("kind") != "header":
        raise ValueError("episode log must start with a header line")
    head = lines[0]
    log = EpisodeLog(
        scenario_id=head["scenario_id"],
        seed=head["seed"],
        dt=head["dt"],
        horizon=head["horizon"],
        roles=tuple(head["roles"]),
        footprints=tuple(tuple(fp) for fp in head["footprints"]),
    )
    for entry in lines[1:]:
        kind = entry.get("kind")
        if kind == "step":
            log.records.append(
                StepRecord(
                    step_index=entry["t"],
                    agents=tuple(tuple(a) for a in entry["agents"]),
                    ego_on_road=entry["on_road"],
                    ego_progress=entry["progress"],
                    ego_lateral=entry["lateral"],
                    collisions=tuple(tuple(p) for p in entry["collisions"]),
                )
            )
        elif kind == "end":
            log.termination = entry["termination"]
        else:
            raise ValueError(f"unknown log line kind {kind!r}")
    return log
