"""Scenario configs, scripted trigger behaviors, and the built-in catalog."""

from .behaviors import (
    DistanceTrigger,
    HardBrakeController,
    LaneShiftController,
    RouteSpeedController,
    StraightLineController,
    build_trigger,
    npc_controller,
)
from .builtin import (
    PRECRASH_NAMES,
    builtin_adversarial,
    builtin_precrash,
    builtin_suite,
)
from .config import (
    BEHAVIOR_PARAMS,
    SCHEMA_VERSION,
    AgentConfig,
    ScenarioConfig,
    TriggerSpec,
    ego_route,
    instantiate,
    load_scenario,
    load_suite,
    save_scenario,
    save_suite,
    validate_scenario,
)

__all__ = [
    "AgentConfig",
    "BEHAVIOR_PARAMS",
    "DistanceTrigger",
    "HardBrakeController",
    "LaneShiftController",
    "PRECRASH_NAMES",
    "RouteSpeedController",
    "SCHEMA_VERSION",
    "ScenarioConfig",
    "StraightLineController",
    "TriggerSpec",
    "build_trigger",
    "builtin_adversarial",
    "builtin_precrash",
    "builtin_suite",
    "ego_route",
    "instantiate",
    "load_scenario",
    "load_suite",
    "npc_controller",
    "save_scenario",
    "save_suite",
    "validate_scenario",
]
