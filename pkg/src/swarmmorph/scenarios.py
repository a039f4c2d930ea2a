"""Built-in missions used by the examples, the experiments and the tests."""

from __future__ import annotations

from .world import Obstacle, Scenario, SwarmConfig, Vec2, nested_v

N_AGENTS = 8
SPACING = 6.0


def _cfg(goal_y: float = 200.0, **kw) -> SwarmConfig:
    return SwarmConfig(n_agents=N_AGENTS, formation=nested_v(N_AGENTS, SPACING), goal=Vec2(0.0, goal_y), **kw)


def open_field(**kw) -> Scenario:
    return Scenario(_cfg(**kw), (), "open")


def centered(**kw) -> Scenario:
    """One wall straight across the flight path."""
    return Scenario(_cfg(**kw), (Obstacle(0, Vec2(0.0, 60.0), 10.0, 4.0),), "centered")


def left_shifted(shift: float = 8.0, **kw) -> Scenario:
    """The same wall moved right, so more free space opens up on the left."""
    return Scenario(_cfg(**kw), (Obstacle(0, Vec2(shift, 60.0), 10.0, 4.0),), "left-shifted")


def forest(**kw) -> Scenario:
    """A wall followed by a pair of walls with a gap between them."""
    obs = (
        Obstacle(0, Vec2(0.0, 70.0), 8.0, 4.0),
        Obstacle(1, Vec2(-14.0, 110.0), 8.0, 4.0),
        Obstacle(2, Vec2(14.0, 110.0), 8.0, 4.0),
    )
    return Scenario(_cfg(goal_y=260.0, **kw), obs, "forest")


BUILTIN = {
    "open": open_field,
    "centered": centered,
    "left-shifted": left_shifted,
    "forest": forest,
}
