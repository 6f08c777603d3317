"""Core value types for the 2D simulation."""

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from ..errors import StateIntegrityError
from .geometry import wrap_angle


class AgentRole(str, Enum):
    EGO = "ego"
    NPC = "npc"
    ADVERSARY = "adversary"


@dataclass(frozen=True)
class Pose:
    """Planar pose; heading is normalized to (-pi, pi] on construction."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.heading)):
            raise StateIntegrityError(f"non-finite pose ({self.x}, {self.y}, {self.heading})")
        object.__setattr__(self, "heading", wrap_angle(self.heading))


@dataclass(frozen=True)
class Action:
    """A raw control command: steering angle (rad) and acceleration (m/s^2).

    Values are stored as given; the environment clamps them to the
    kinematic bounds when the action is applied.
    """

    steer: float
    accel: float

    def __post_init__(self):
        if not (math.isfinite(self.steer) and math.isfinite(self.accel)):
            raise StateIntegrityError(f"non-finite action ({self.steer}, {self.accel})")


@dataclass(frozen=True)
class KinematicsParams:
    """Kinematic bicycle parameters and control bounds.

    lf/lr are the distances from the center of gravity to the front/rear
    axle; the model integrates the CoG.
    """

    lf: float = 1.25
    lr: float = 1.25
    max_steer: float = 0.6
    min_accel: float = -6.0
    max_accel: float = 3.0
    max_speed: float = 15.0

    def __post_init__(self):
        if self.lf <= 0 or self.lr <= 0:
            raise ValueError("axle distances must be positive")
        if self.max_steer <= 0 or self.max_steer >= math.pi / 2:
            raise ValueError("max_steer must lie in (0, pi/2)")
        if self.min_accel >= 0 or self.max_accel <= 0:
            raise ValueError("accel bounds must straddle zero")
        if self.max_speed <= 0:
            raise ValueError("max_speed must be positive")

    @property
    def wheelbase(self) -> float:
        return self.lf + self.lr

    def slip_angle(self, steer: float) -> float:
        return math.atan(self.lr / self.wheelbase * math.tan(steer))

    def clamp_action(self, action: Action) -> Action:
        steer = min(self.max_steer, max(-self.max_steer, action.steer))
        accel = min(self.max_accel, max(self.min_accel, action.accel))
        if steer == action.steer and accel == action.accel:
            return action
        return Action(steer, accel)


DEFAULT_PARAMS = KinematicsParams()

# Vehicle and pedestrian body sizes (length, width) in meters.
CAR_FOOTPRINT = (4.5, 2.0)
PEDESTRIAN_FOOTPRINT = (0.6, 0.6)


@dataclass(frozen=True)
class AgentState:
    """One agent: pose, forward speed, body rectangle, and role."""

    pose: Pose
    speed: float
    footprint: tuple[float, float] = CAR_FOOTPRINT
    role: AgentRole = AgentRole.NPC

    def __post_init__(self):
        if not math.isfinite(self.speed):
            raise StateIntegrityError(f"non-finite speed {self.speed}")
        if self.speed < 0:
            raise StateIntegrityError(f"negative speed {self.speed}")
        if len(self.footprint) != 2 or min(self.footprint) <= 0:
            raise ValueError(f"bad footprint {self.footprint}")

    def as_array(self):
        """State as (x, y, heading, speed), the order used by the dynamics."""
        import numpy as np

        return np.array([self.pose.x, self.pose.y, self.pose.heading, self.speed])


@dataclass(frozen=True)
class WorldState:
    """Immutable snapshot of every agent at one step.

    Stepping produces a new WorldState; agent count, dt, and params are
    constant along a rollout.
    """

    agents: tuple[AgentState, ...]
    step_index: int = 0
    dt: float = 0.1
    params: KinematicsParams = field(default_factory=KinematicsParams)

    def __post_init__(self):
        if not self.agents:
            raise ValueError("world must contain at least one agent")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.step_index < 0:
            raise ValueError("step_index must be non-negative")
        object.__setattr__(self, "agents", tuple(self.agents))

    @property
    def ego(self) -> AgentState:
        return self.agents[0]

    def with_agent(self, index: int, agent: AgentState) -> "WorldState":
        agents = list(self.agents)
        agents[index] = agent
        return replace(self, agents=tuple(agents))
