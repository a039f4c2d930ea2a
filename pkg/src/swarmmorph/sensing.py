"""Obstacle detection, time to impact, stopping distance and the danger zone."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .world import UP, AgentState, Obstacle, Vec2, rect_edges


@dataclass(frozen=True)
class Sighting:
    obstacle_id: int
    distance: float
    bearing_left: float
    bearing_right: float
    t_imp: float


@dataclass(frozen=True)
class DetectionReport:
    obstacles_in_range: tuple[Sighting, ...] = field(default_factory=tuple)
    danger_zone: float = 0.0

    @property
    def detected(self) -> bool:
        return bool(self.obstacles_in_range)

    @property
    def ids(self) -> list[int]:
        return [s.obstacle_id for s in self.obstacles_in_range]


class StoppingDistance(NamedTuple):
    d_s: float
    d_r: float
    d_b: float


def time_to_impact(d_oi: float, v: float) -> float:
    if d_oi < 0:
        raise ValueError(f"distance must be non-negative, got {d_oi}")
    if v <= 0:
        return math.inf
    return d_oi / v


def stopping_distance(v: float, g: float = 9.81, c_d: float = 0.3, t_c: float = 0.0) -> StoppingDistance:
    """Reaction plus braking distance, with braking taken as v^2 / (2 g c_d)."""
    if g <= 0 or c_d <= 0:
        raise ValueError("g and c_d must be positive")
    if v < 0 or t_c < 0:
        raise ValueError("v and t_c must be non-negative")
    d_b = v * v / (2.0 * g * c_d)
    d_r = v * t_c
    return StoppingDistance(d_r + d_b, d_r, d_b)


def danger_zone(d_s: float, margin: float) -> float:
    if d_s < 0 or margin < 0:
        raise ValueError("d_s and margin must be non-negative")
    return d_s + margin


def bearing(frm: Vec2, heading: Vec2, to: Vec2) -> float:
    """Signed angle (rad, counter-clockwise positive) from ``heading`` to the target."""
    d = to - frm
    return math.atan2(heading.cross(d), heading.dot(d))


def detect(
    agent: AgentState,
    obstacles: Sequence[Obstacle],
    detection_range: float,
    heading: Vec2 = UP,
    g: float = 9.81,
    c_d: float = 0.3,
    t_c: float = 0.0,
    margin: float = 0.0,
) -> DetectionReport:
    """Report every obstacle whose nearest boundary point is within range.

    Bearings are taken from the agent's own heading to the two front corners
    of each obstacle (front relative to the swarm ``heading``). Results are
    sorted by distance, then obstacle id.
    """
    if detection_range <= 0:
        raise ValueError("detection_range must be positive")
    v = agent.speed
    seen = []
    for o in obstacles:
        d = o.distance_to(agent.pos)
        if d <= detection_range:
            left, right = rect_edges(o, heading)
            seen.append(
                Sighting(
                    o.id,
                    d,
                    bearing(agent.pos, agent.heading, left),
                    bearing(agent.pos, agent.heading, right),
                    time_to_impact(d, v),
                )
            )
    seen.sort(key=lambda s: (s.distance, s.obstacle_id))
    zone = danger_zone(stopping_distance(v, g, c_d, t_c).d_s, margin)
    return DetectionReport(tuple(seen), zone)
