"""Suite runner: every (scenario, seed) pair to termination, plus
row-level results and aggregate metrics.

Each episode gets its own RNG stream derived from (seed, scenario id),
so runs are reproducible and independent of execution order. Scenario
instantiation failures become error rows; the suite keeps going.
"""

import zlib

import numpy as np

from ..engine import AutopilotController, PolicyController, run_episode
from ..policies.autopilot import AutopilotConfig
from ..policies.network import PolicyParams
from ..scenarios.behaviors import npc_controller
from ..scenarios.config import ScenarioConfig, ego_route, instantiate
from ..sim.maps import get_map
from ..sim.routes import Route
from ..sim.types import AgentRole
from .log import EpisodeLog
from .metrics import MetricSet, episode_metrics

from dataclasses import dataclass, field


@dataclass
class SuiteResult:
    rows: list = field(default_factory=list)
    logs: list = field(default_factory=list)
    per_scenario: dict = field(default_factory=dict)
    aggregate: MetricSet | None = None


def episode_rng(seed: int, scenario_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(scenario_id.encode())])


def build_ego_controller(ego, config: ScenarioConfig, route):
    if isinstance(ego, PolicyParams):
        return PolicyController(ego, route, config.horizon, deterministic=True)
    if ego == "autopilot":
        speed = config.ego.speed if config.ego.speed > 0 else 8.0
        return AutopilotController(route, AutopilotConfig(desired_speed=speed))
    raise ValueError(f"unknown ego controller spec {ego!r}")


def run_scenario(
    config: ScenarioConfig,
    ego="autopilot",
    adversary: PolicyParams | None = None,
    seed: int = 0,
    deterministic_adversary: bool = False,
) -> EpisodeLog:
    """Run one scenario once. The adversary policy (when given) replaces
    the controller of every adversary-role agent and samples from its
    action distribution, so different seeds explore different runs."""
    world, triggers = instantiate(config)
    map_model = get_map(config.map_name)
    route = ego_route(config)
    controllers = [build_ego_controller(ego, config, route)]
    for i, npc in enumerate(config.npcs):
        agent = world.agents[i + 1]
        if agent.role is AgentRole.ADVERSARY and adversary is not None:
            npc_route = route if npc.route is None else Route(npc.route)
            controllers.append(
                PolicyController(
                    adversary,
                    npc_route,
                    config.horizon,
                    deterministic=deterministic_adversary,
                )
            )
        else:
            controllers.append(npc_controller(npc, map_model))
    return run_episode(
        world,
        controllers,
        route,
        config.horizon,
        map_model=map_model,
        triggers=triggers,
        rng=episode_rng(seed, config.scenario_id),
        scenario_id=config.scenario_id,
        seed=seed,
    )


def episode_row(log: EpisodeLog) -> dict:
    m = episode_metrics(log)
    return {
        "scenario": log.scenario_id,
        "seed": log.seed,
        "collision": int(m.cr),
        "or_m": m.or_meters,
        "dr_m": m.dr_meters,
        "rc": m.rc,
        "termination": log.termination,
    }


def aggregate_rows(rows) -> MetricSet | None:
    """Mean metrics over non-error rows; None when nothing succeeded."""
    valid = [r for r in rows if "error" not in r]
    if not valid:
        return None
    n = len(valid)
    return MetricSet(
        cr=sum(r["collision"] for r in valid) / n,
        or_meters=sum(r["or_m"] for r in valid) / n,
        dr_meters=sum(r["dr_m"] for r in valid) / n,
        rc=sum(r["rc"] for r in valid) / n,
    )


def run_suite(
    scenarios,
    ego="autopilot",
    adversary: PolicyParams | None = None,
    seeds=(0,),
    collect_logs: bool = True,
) -> SuiteResult:
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("run_suite needs at least one scenario")
    result = SuiteResult()
    for config in scenarios:
        for seed in seeds:
            try:
                log = run_scenario(config, ego=ego, adversary=adversary, seed=seed)
            except Exception as exc:  # noqa: BLE001 - suite must keep going
                result.rows.append(
                    {"scenario": config.scenario_id, "seed": seed, "error": str(exc)}
                )
                continue
            result.rows.append(episode_row(log))
            if collect_logs:
                result.logs.append(log)
    by_scenario = {}
    for row in result.rows:
        by_scenario.setdefault(row["scenario"], []).append(row)
    for scenario_id, rows in by_scenario.items():
        agg = aggregate_rows(rows)
        if agg is not None:
            result.per_scenario[scenario_id] = agg
    result.aggregate = aggregate_rows(result.rows)
    return result
