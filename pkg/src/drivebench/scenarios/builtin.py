"""Built-in scenario catalog.

Eight pre-crash traffic situations (each in two variations) plus a
parameterized family of plain two-car worlds used for adversary
training and evaluation. All of them run on the built-in maps and pass
schema validation.
"""

import math

from ..sim.maps import LANE_WIDTH, left_turn_route, right_turn_route
from ..sim.types import PEDESTRIAN_FOOTPRINT
from .config import AgentConfig, ScenarioConfig, TriggerSpec

_H = LANE_WIDTH / 2  # lane center offset from the road axis

PRECRASH_NAMES = (
    "straight-obstacle",
    "turning-obstacle",
    "lane-changing",
    "vehicle-passing",
    "red-light-running",
    "unprotected-left-turn",
    "right-turn",
    "dynamic-object-crossing",
)


def _arc_waypoints(radius: float, start_deg: float, end_deg: float, step_deg: float = 2.5):
    n = max(2, int(round(abs(end_deg - start_deg) / step_deg)) + 1)
    pts = []
    for k in range(n):
        a = math.radians(start_deg + (end_deg - start_deg) * k / (n - 1))
        pts.append((radius * math.cos(a), radius * math.sin(a)))
    return tuple(pts)


def _arc_pose(radius: float, angle_deg: float) -> tuple[float, float, float]:
    a = math.radians(angle_deg)
    # CCW travel: heading is the tangent, 90 degrees ahead of the radial angle
    return (radius * math.cos(a), radius * math.sin(a), a + math.pi / 2)


def _straight_obstacle(v: int) -> ScenarioConfig:
    obstacle = (60.0, -_H, 0.0) if v == 0 else (90.0, -_H + 0.6, 0.3)
    end = 160.0 if v == 0 else 180.0
    return ScenarioConfig(
        scenario_id="straight-obstacle" if v == 0 else "straight-obstacle-v2",
        map_name="straight",
        ego=AgentConfig((0.0, -_H, 0.0), 8.0, ((0.0, -_H), (end, -_H))),
        npcs=(AgentConfig(obstacle, 0.0, None),),
        horizon=320,
    )


def _turning_obstacle(v: int) -> ScenarioConfig:
    r = 50.0 - _H
    start = -5.0 if v == 0 else -10.0
    block = 30.0 if v == 0 else 55.0
    return ScenarioConfig(
        scenario_id="turning-obstacle" if v == 0 else "turning-obstacle-v2",
        map_name="curved",
        ego=AgentConfig(_arc_pose(r, start), 8.0, _arc_waypoints(r, start, 125.0)),
        npcs=(AgentConfig(_arc_pose(r, block), 0.0, None),),
        horizon=400,
    )


def _lane_changing(v: int) -> ScenarioConfig:
    x0, speed, thresh, rate, slow = (
        (25.0, 6.0, 15.0, 1.75, 5.0) if v == 0 else (30.0, 7.0, 20.0, 1.2, 4.0)
    )
    return ScenarioConfig(
        scenario_id="lane-changing" if v == 0 else "lane-changing-v2",
        map_name="straight",
        ego=AgentConfig((0.0, -_H, 0.0), 8.0, ((0.0, -_H), (200.0, -_H))),
        npcs=(AgentConfig((x0, _H, 0.0), speed, ((x0, _H), (220.0, _H))),),
        triggers=(
            TriggerSpec(0, thresh, "cut-in", {"lateral_rate": rate, "target_speed": slow}),
        ),
        horizon=400,
    )


def _vehicle_passing(v: int) -> ScenarioConfig:
    x0, speed, thresh, rate = (120.0, 7.0, 30.0, 1.2) if v == 0 else (150.0, 8.0, 40.0, 1.5)
    return ScenarioConfig(
        scenario_id="vehicle-passing" if v == 0 else "vehicle-passing-v2",
        map_name="straight",
        ego=AgentConfig((0.0, -_H, 0.0), 8.0, ((0.0, -_H), (200.0, -_H))),
        npcs=(AgentConfig((x0, _H, math.pi), speed, ((x0, _H), (-15.0, _H))),),
        triggers=(TriggerSpec(0, thresh, "oncoming-drift", {"lateral_rate": rate}),),
        horizon=400,
    )


def _red_light_running(v: int) -> ScenarioConfig:
    if v == 0:
        npc = AgentConfig((_H, -55.0, math.pi / 2), 7.0, ((_H, -55.0), (_H, 60.0)))
        trigger = TriggerSpec(0, 25.0, "run-red-light", {"speed": 10.0})
    else:
        npc = AgentConfig((-_H, 50.0, -math.pi / 2), 6.0, ((-_H, 50.0), (-_H, -60.0)))
        trigger = TriggerSpec(0, 30.0, "run-red-light", {"speed": 9.0})
    return ScenarioConfig(
        scenario_id="red-light-running" if v == 0 else "red-light-running-v2",
        map_name="intersection",
        ego=AgentConfig((-50.0, -_H, 0.0), 8.0, ((-50.0, -_H), (60.0, -_H))),
        npcs=(npc,),
        triggers=(trigger,),
        horizon=300,
    )


def _unprotected_left_turn(v: int) -> ScenarioConfig:
    route = tuple((float(x), float(y)) for x, y in left_turn_route())
    route = ((-60.0, -_H),) + route[1:]
    x0, speed, thresh, boost = (55.0, 7.0, 30.0, 9.0) if v == 0 else (65.0, 8.0, 35.0, 10.0)
    return ScenarioConfig(
        scenario_id="unprotected-left-turn" if v == 0 else "unprotected-left-turn-v2",
        map_name="intersection",
        ego=AgentConfig((-60.0, -_H, 0.0), 7.0, route),
        npcs=(AgentConfig((x0, _H, math.pi), speed, ((x0, _H), (-70.0, _H))),),
        triggers=(TriggerSpec(0, thresh, "run-red-light", {"speed": boost}),),
        horizon=400,
    )


def _right_turn(v: int) -> ScenarioConfig:
    route = tuple((float(x), float(y)) for x, y in right_turn_route())
    route = ((-50.0, -_H),) + route[1:-1] + ((-_H, -60.0),)
    y0, speed, thresh = (-12.0, 5.0, 14.0) if v == 0 else (-16.0, 6.0, 12.0)
    return ScenarioConfig(
        scenario_id="right-turn" if v == 0 else "right-turn-v2",
        map_name="intersection",
        ego=AgentConfig((-50.0, -_H, 0.0), 7.0, route),
        npcs=(AgentConfig((-_H, y0, -math.pi / 2), speed, ((-_H, y0), (-_H, -70.0))),),
        triggers=(TriggerSpec(0, thresh, "hard-brake"),),
        horizon=400,
    )


def _dynamic_object_crossing(v: int) -> ScenarioConfig:
    if v == 0:
        ped = AgentConfig((50.0, -3.0, math.pi / 2), 0.0, None, footprint=PEDESTRIAN_FOOTPRINT)
        trigger = TriggerSpec(0, 15.0, "pedestrian-cross", {"speed": 1.5})
    else:
        ped = AgentConfig((70.0, 3.0, -math.pi / 2), 0.0, None, footprint=PEDESTRIAN_FOOTPRINT)
        trigger = TriggerSpec(0, 18.0, "pedestrian-cross", {"speed": 2.0})
    return ScenarioConfig(
        scenario_id="dynamic-object-crossing" if v == 0 else "dynamic-object-crossing-v2",
        map_name="straight",
        ego=AgentConfig((0.0, -_H, 0.0), 8.0, ((0.0, -_H), (160.0, -_H))),
        npcs=(ped,),
        triggers=(trigger,),
        horizon=300,
    )


_BUILDERS = (
    _straight_obstacle,
    _turning_obstacle,
    _lane_changing,
    _vehicle_passing,
    _red_light_running,
    _unprotected_left_turn,
    _right_turn,
    _dynamic_object_crossing,
)


def builtin_precrash(variation: int = 0) -> list[ScenarioConfig]:
    """The eight pre-crash traffic scenarios (one chosen variation)."""
    if variation not in (0, 1):
        raise ValueError("variation must be 0 or 1")
    return [build(variation) for build in _BUILDERS]


def builtin_suite() -> list[ScenarioConfig]:
    """All 16 pre-crash configs: both variations of each scenario."""
    return builtin_precrash(0) + builtin_precrash(1)


# (initial gap ahead of the ego, npc speed); the ego cruises at 8, so
# every entry closes within a few seconds, which keeps the worlds
# learnable for a from-scratch policy adversary
_ADVERSARIAL_GRID = (
    (8.0, 5.0), (9.0, 5.0), (10.0, 5.0), (11.0, 5.0),
    (8.0, 4.0), (9.0, 4.0), (10.0, 4.0), (11.0, 4.0),
    (8.0, 4.5), (9.0, 4.5), (10.0, 4.5), (11.0, 4.5),
    (8.0, 5.5), (8.5, 5.5), (9.0, 5.5), (9.5, 5.5),
    (8.0, 6.0), (8.5, 6.0), (10.0, 3.5), (11.0, 3.5),
)


def builtin_adversarial(count: int = 20) -> list[ScenarioConfig]:
    """Plain two-car worlds: ego in the right lane, one adversary-role
    car in the left lane at a varying offset and speed, no triggers.

    Under normal route-following traffic these are collision-free; they
    exist to measure what a trained adversary policy changes.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    configs = []
    for i in range(count):
        x0, speed = _ADVERSARIAL_GRID[i % len(_ADVERSARIAL_GRID)]
        x0 += 0.1 * (i // len(_ADVERSARIAL_GRID))
        configs.append(
            ScenarioConfig(
                scenario_id=f"adversarial-{i:02d}",
                map_name="straight",
                ego=AgentConfig((0.0, -_H, 0.0), 8.0, ((0.0, -_H), (130.0, -_H))),
                npcs=(
                    AgentConfig(
                        (x0, _H, 0.0), speed, ((x0, _H), (200.0, _H)), role="adversary"
                    ),
                ),
                horizon=300,
            )
        )
    return configs
