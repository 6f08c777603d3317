"""Collision detection for oriented rectangles via separating axes."""

import numpy as np

from .geometry import rectangle_corners
from .types import AgentState, WorldState


def agent_corners(agent: AgentState) -> np.ndarray:
    length, width = agent.footprint
    return rectangle_corners(agent.pose.x, agent.pose.y, agent.pose.heading, length, width)


def rectangles_overlap(corners_a: np.ndarray, corners_b: np.ndarray) -> bool:
    """Separating-axis test for two oriented rectangles (touching counts)."""
    for rect in (corners_a, corners_b):
        for k in range(2):  # two unique edge normals per rectangle
            edge = rect[k + 1] - rect[k]
            axis = np.array([-edge[1], edge[0]])
            pa = corners_a @ axis
            pb = corners_b @ axis
            if pa.max() < pb.min() or pb.max() < pa.min():
                return False
    return True


def detect_collisions(world: WorldState) -> list[tuple[int, int]]:
    """All overlapping agent pairs, as sorted (i, j) tuples with i < j.

    An agent never collides with itself; the relation is symmetric by
    construction.
    """
    corners = [agent_corners(agent) for agent in world.agents]
    pairs = []
    n = len(corners)
    for i in range(n):
        for j in range(i + 1, n):
            if rectangles_overlap(corners[i], corners[j]):
                pairs.append((i, j))
    return pairs
