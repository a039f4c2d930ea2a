"""Point-mass motion with linear acceleration limits and a bounded turn rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .world import AgentState, Vec2


@dataclass(frozen=True, slots=True)
class MotionCommand:
    desired_heading: Vec2
    desired_speed: float

    @classmethod
    def clamped(cls, heading: Vec2, speed: float, max_speed: float) -> MotionCommand:
        h = heading.normalized()
        return cls(h, min(max(speed, 0.0), max_speed))


def rotate_toward(heading: Vec2, target: Vec2, max_angle: float) -> Vec2:
    """Turn unit vector ``heading`` toward ``target`` by at most ``max_angle`` radians."""
    t = target.normalized()
    if t.norm() == 0.0:
        return heading
    angle = math.atan2(heading.cross(t), heading.dot(t))
    if abs(angle) <= max_angle:
        return t
    a = math.copysign(max_angle, angle)
    c, s = math.cos(a), math.sin(a)
    return Vec2(heading.x * c - heading.y * s, heading.x * s + heading.y * c)


def step(
    agent: AgentState,
    cmd: MotionCommand,
    dt: float,
    a_max: float,
    turn_rate: float = math.pi / 2,
    speed_cap: float = 20.0,
) -> AgentState:
    """Advance ``agent`` by one tick (forward Euler on position)."""
    if dt <= 0 or a_max <= 0:
        raise ValueError("dt and a_max must be positive")
    v_top = min(agent.max_speed, speed_cap)
    speed = agent.speed
    want = min(max(cmd.desired_speed, 0.0), v_top)
    dv = min(max(want - speed, -a_max * dt), a_max * dt)
    new_speed = min(max(speed + dv, 0.0), v_top)
    new_heading = rotate_toward(agent.heading, cmd.desired_heading, turn_rate * dt)
    return agent.with_(
        pos=agent.pos + agent.vel * dt,
        vel=new_heading * new_speed,
        heading=new_heading,
    )


def time_to_stop(v: float, a_max: float) -> float:
    if v < 0 or a_max <= 0:
        raise ValueError("need v >= 0 and a_max > 0")
    return v / a_max


def braking_steps(v_max: float, a_max: float, dt: float) -> int:
    """Ticks needed to brake from ``v_max`` to rest, plus the first coasting tick."""
    return int(math.ceil(v_max / (a_max * dt) - 1e-9)) + 2


def braking_tracks(
    pos: np.ndarray,
    heading: np.ndarray,
    speed: np.ndarray,
    a_max: float,
    dt: float,
    steps: int,
) -> np.ndarray:
    """Positions visited when braking at ``a_max`` in a straight line.

    ``pos``/``heading`` are (n, 2), ``speed`` is (n,). Element ``k`` of the
    result is the position ``k`` ticks later under the same forward-Euler
    update used by :func:`step`; the track holds at the stopping point.
    Returns (n, steps, 2).
    """
    k = np.arange(steps, dtype=float)
    # speed during tick m is max(v - m*a*dt, 0); position k is the sum over m < k
    v = np.maximum(speed[:, None] - k[None, :] * a_max * dt, 0.0)
    travelled = np.concatenate(
        [np.zeros((len(speed), 1)), np.cumsum(v[:, :-1], axis=1) * dt], axis=1
    )
    return pos[:, None, :] + heading[:, None, :] * travelled[:, :, None]
