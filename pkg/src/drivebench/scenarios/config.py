"""Scenario configuration: schema, validation, JSON round trip.

A scenario pins down a map, an ego spawn with a route, a list of NPCs
(each with a spawn, an optional route, and a role), and distance
triggers that swap an NPC onto a scripted behavior the first time the
ego comes close. Configs are immutable and instantiation consumes no
randomness, so repeated instantiation yields identical worlds.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ScenarioValidationError
from ..sim.maps import MapModel, builtin_map_names, get_map, point_on_drivable
from ..sim.routes import Route
from ..sim.types import (
    CAR_FOOTPRINT,
    AgentRole,
    AgentState,
    KinematicsParams,
    Pose,
    WorldState,
)

SCHEMA_VERSION = 1

# behavior name -> parameter names it accepts
BEHAVIOR_PARAMS = {
    "hard-brake": (),
    "cut-in": ("lateral_rate", "target_speed"),
    "pull-in-front-and-stop": ("lateral_rate", "target_speed"),
    "oncoming-drift": ("lateral_rate",),
    "pedestrian-cross": ("speed",),
    "run-red-light": ("speed",),
}

ROLES = ("npc", "adversary")


@dataclass(frozen=True)
class AgentConfig:
    """Spawn state for one agent: pose, initial speed, optional route."""

    spawn: tuple[float, float, float]
    speed: float = 0.0
    route: tuple[tuple[float, float], ...] | None = None
    role: str = "npc"
    footprint: tuple[float, float] = CAR_FOOTPRINT

    def to_json(self) -> dict:
        return {
            "spawn": list(self.spawn),
            "speed": self.speed,
            "route": None if self.route is None else [list(p) for p in self.route],
            "role": self.role,
            "footprint": list(self.footprint),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AgentConfig":
        route = data.get("route")
        return cls(
            spawn=tuple(float(v) for v in data["spawn"]),
            speed=float(data.get("speed", 0.0)),
            route=None if route is None else tuple((float(p[0]), float(p[1])) for p in route),
            role=str(data.get("role", "npc")),
            footprint=tuple(float(v) for v in data.get("footprint", CAR_FOOTPRINT)),
        )


@dataclass(frozen=True)
class TriggerSpec:
    """Arms one NPC: when the ego gets within `distance` meters of it,
    the NPC switches to `behavior` (with behavior-specific params)."""

    npc_index: int
    distance: float
    behavior: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "npc": self.npc_index,
            "distance": self.distance,
            "behavior": self.behavior,
            "params": dict(self.params),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TriggerSpec":
        return cls(
            npc_index=int(data["npc"]),
            distance=float(data["distance"]),
            behavior=str(data["behavior"]),
            params=dict(data.get("params", {})),
        )


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str
    map_name: str
    ego: AgentConfig
    npcs: tuple[AgentConfig, ...] = ()
    triggers: tuple[TriggerSpec, ...] = ()
    horizon: int = 600
    dt: float = 0.1

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario_id": self.scenario_id,
            "map": self.map_name,
            "horizon": self.horizon,
            "dt": self.dt,
            "ego": self.ego.to_json(),
            "npcs": [npc.to_json() for npc in self.npcs],
            "triggers": [t.to_json() for t in self.triggers],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ScenarioConfig":
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ScenarioValidationError([f"unsupported schema_version {version}"])
        if "ego" not in data or "map" not in data:
            raise ScenarioValidationError(["missing required field 'map' or 'ego'"])
        return cls(
            scenario_id=str(data.get("scenario_id", "unnamed")),
            map_name=str(data["map"]),
            ego=AgentConfig.from_json(data["ego"]),
            npcs=tuple(AgentConfig.from_json(n) for n in data.get("npcs", [])),
            triggers=tuple(TriggerSpec.from_json(t) for t in data.get("triggers", [])),
            horizon=int(data.get("horizon", 600)),
            dt=float(data.get("dt", 0.1)),
        )


def _check_agent(label: str, agent: AgentConfig, map_model: MapModel | None, violations: list):
    if len(agent.spawn) != 3 or not all(math.isfinite(v) for v in agent.spawn):
        violations.append(f"{label}: spawn must be 3 finite numbers (x, y, heading)")
        return
    if not math.isfinite(agent.speed) or agent.speed < 0.0:
        violations.append(f"{label}: speed must be finite and non-negative")
    if agent.route is not None and len(agent.route) < 2:
        violations.append(f"{label}: route needs at least 2 waypoints")
    if len(agent.footprint) != 2 or min(agent.footprint) <= 0.0:
        violations.append(f"{label}: footprint must be positive (length, width)")
    if map_model is not None:
        x, y = agent.spawn[0], agent.spawn[1]
        if not point_on_drivable(x, y, map_model):
            violations.append(f"{label}: spawn ({x:g}, {y:g}) is outside the drivable area")


def validate_scenario(config: ScenarioConfig) -> list:
    """Return a list of human-readable schema violations (empty if valid)."""
    violations = []
    map_model = None
    if config.map_name not in builtin_map_names():
        violations.append(f"unknown map '{config.map_name}'")
    else:
        map_model = get_map(config.map_name)
    if config.horizon < 1:
        violations.append("horizon must be >= 1")
    if not (math.isfinite(config.dt) and config.dt > 0.0):
        violations.append("dt must be positive")
    if config.ego.route is None:
        violations.append("ego: route is required")
    _check_agent("ego", config.ego, map_model, violations)
    for i, npc in enumerate(config.npcs):
        _check_agent(f"npc {i}", npc, map_model, violations)
        if npc.role not in ROLES:
            violations.append(f"npc {i}: unknown role '{npc.role}'")
    for k, trig in enumerate(config.triggers):
        if not (0 <= trig.npc_index < len(config.npcs)):
            violations.append(f"trigger {k}: npc index {trig.npc_index} out of range")
        if not (math.isfinite(trig.distance) and trig.distance > 0.0):
            violations.append(f"trigger {k}: distance threshold must be > 0")
        if trig.behavior not in BEHAVIOR_PARAMS:
            violations.append(f"trigger {k}: unknown behavior '{trig.behavior}'")
        else:
            if (
                trig.behavior == "run-red-light"
                and 0 <= trig.npc_index < len(config.npcs)
                and config.npcs[trig.npc_index].route is None
            ):
                violations.append(
                    f"trigger {k}: run-red-light requires npc {trig.npc_index} to have a route"
                )
            allowed = set(BEHAVIOR_PARAMS[trig.behavior])
            for key, value in trig.params.items():
                if key not in allowed:
                    violations.append(
                        f"trigger {k}: behavior '{trig.behavior}' does not take param '{key}'"
                    )
                elif not (isinstance(value, (int, float)) and math.isfinite(value)):
                    violations.append(f"trigger {k}: param '{key}' must be a finite number")
    return violations


def save_scenario(config: ScenarioConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(config.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario file; raises on any schema violation."""
    with open(path) as fh:
        data = json.load(fh)
    config = ScenarioConfig.from_json(data)
    violations = validate_scenario(config)
    if violations:
        raise ScenarioValidationError(violations)
    return config


def save_suite(configs, directory, seeds: int = 2, name: str = "suite.json"):
    """Write each scenario file plus a suite file listing them.

    The suite file holds scenario paths relative to its own directory
    and the number of evaluation seeds to run per scenario. Returns the
    suite file path.
    """
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    filenames = []
    for config in configs:
        filename = f"{config.scenario_id}.json"
        save_scenario(config, directory / filename)
        filenames.append(filename)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "scenarios": filenames,
        "seeds": int(seeds),
    }
    suite_path = directory / name
    with open(suite_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return suite_path


def load_suite(path) -> tuple[list, int]:
    """Load a suite file: (scenario configs, evaluation seed count).

    Scenario paths resolve relative to the suite file's directory, and
    every scenario is validated on load.
    """
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported suite schema version {data.get('schema_version')!r}")
    seeds = int(data.get("seeds", 1))
    if seeds < 1:
        raise ValueError("suite seeds must be >= 1")
    entries = data.get("scenarios")
    if not isinstance(entries, list) or not entries:
        raise ValueError("suite file must list at least one scenario")
    configs = [load_scenario(path.parent / entry) for entry in entries]
    return configs, seeds


def ego_route(config: ScenarioConfig) -> Route:
    return Route(config.ego.route)


def instantiate(
    config: ScenarioConfig,
    map_registry=None,
    params: KinematicsParams | None = None,
) -> tuple[WorldState, list]:
    """Build the initial world and the armed trigger list for a config.

    Agent 0 is the ego; npcs[i] becomes agent i + 1. Pure: consumes no
    randomness, so calling twice gives identical worlds.
    """
    from .behaviors import build_trigger

    violations = validate_scenario(config)
    if violations:
        raise ScenarioValidationError(violations)
    lookup = map_registry or get_map
    map_model = lookup(config.map_name)
    agents = [
        AgentState(
            pose=Pose(*config.ego.spawn),
            speed=config.ego.speed,
            footprint=config.ego.footprint,
            role=AgentRole.EGO,
        )
    ]
    for npc in config.npcs:
        role = AgentRole.ADVERSARY if npc.role == "adversary" else AgentRole.NPC
        agents.append(
            AgentState(
                pose=Pose(*npc.spawn),
                speed=npc.speed,
                footprint=npc.footprint,
                role=role,
            )
        )
    world = WorldState(
        agents=tuple(agents),
        step_index=0,
        dt=config.dt,
        params=params or KinematicsParams(),
    )
    route = ego_route(config)
    triggers = []
    for spec in config.triggers:
        npc = config.npcs[spec.npc_index]
        npc_route = None if npc.route is None else Route(npc.route)
        triggers.append(build_trigger(spec, route, npc_route, map_model))
    return world, triggers
