import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmmorph.world import (
    UP,
    FormationSpec,
    Obstacle,
    Scenario,
    SwarmConfig,
    Vec2,
    initial_agents,
    mirror_scenario,
    nested_v,
    rect_edges,
)

coord = st.floats(-500, 500, allow_nan=False)
size = st.floats(0.1, 50, allow_nan=False)


def test_rect_edges_axis_aligned():
    o = Obstacle(0, Vec2(0, 0), 5, 1)
    assert rect_edges(o, UP) == (Vec2(-5, -1), Vec2(5, -1))


def test_rect_edges_translated():
    o = Obstacle(0, Vec2(10, 0), 2, 2)
    assert rect_edges(o, UP) == (Vec2(8, -2), Vec2(12, -2))


@pytest.mark.parametrize("hw, hd", [(0, 1), (1, 0), (-1, 1)])
def test_degenerate_obstacle_rejected(hw, hd):
    with pytest.raises(ValueError):
        Obstacle(0, Vec2(0, 0), hw, hd)


def test_vec2_rejects_nan():
    with pytest.raises(ValueError):
        Vec2(math.nan, 0)


def test_mirror_examples():
    cfg = SwarmConfig(n_agents=2, formation=nested_v(2), goal=Vec2(0, 100))
    _, obs = mirror_scenario(cfg, [Obstacle(0, Vec2(3, 50), 1, 1), Obstacle(1, Vec2(0, 50), 1, 1)])
    assert obs[0].center == Vec2(-3, 50)
    assert obs[1].center == Vec2(0, 50)


@given(st.lists(st.tuples(coord, coord, size, size), min_size=1, max_size=5), coord)
def test_mirror_twice_is_identity(specs, start_x):
    cfg = SwarmConfig(n_agents=3, formation=nested_v(3), goal=Vec2(start_x, 100), start=Vec2(start_x, 0))
    obs = tuple(Obstacle(i, Vec2(x, y), w, d) for i, (x, y, w, d) in enumerate(specs))
    sc = Scenario(cfg, obs)
    twice = sc.mirrored().mirrored()
    assert twice.cfg.start == cfg.start and twice.cfg.goal == cfg.goal
    for a, b in zip(twice.obstacles, obs):
        assert a.center.x == pytest.approx(b.center.x, abs=1e-9) and a.center.y == b.center.y
    assert twice.cfg.formation.slots == cfg.formation.slots


@given(st.integers(1, 20), st.floats(0.5, 20))
def test_nested_v_spacing_and_centroid(n, spacing):
    f = nested_v(n, spacing)
    assert len(f) == n
    pts = f.slots
    assert abs(sum(p.x for p in pts) / n) < 1e-9 and abs(sum(p.y for p in pts) / n) < 1e-9
    if n > 1:
        nn = [min((p - q).norm() for q in pts if q is not p) for p in pts]
        assert all(d == pytest.approx(spacing) for d in nn)


def test_formation_rejects_crowded_slots():
    with pytest.raises(ValueError, match="below inter_agent_distance"):
        FormationSpec((Vec2(0, 0), Vec2(1, 0)), UP, 2.0)


def test_config_rejects_slot_count_mismatch():
    with pytest.raises(ValueError, match="slots"):
        SwarmConfig(n_agents=3, formation=nested_v(2), goal=Vec2(0, 1))


@pytest.mark.parametrize(
    "field, value",
    [("dist_safe", -1.0), ("dt", 0.0), ("speed_margin", 10.0), ("detection_range", 1.0)],
)
def test_config_rejects_bad_values(field, value):
    with pytest.raises(ValueError, match=field):
        SwarmConfig(n_agents=2, formation=nested_v(2), goal=Vec2(0, 1), **{field: value})


def test_initial_agents_on_slots():
    cfg = SwarmConfig(n_agents=4, formation=nested_v(4), goal=Vec2(0, 100), start=Vec2(5, 5))
    agents = initial_agents(cfg)
    assert [a.pos for a in agents] == cfg.formation.placed(Vec2(5, 5))
    assert all(a.speed == cfg.nominal_speed and a.heading == UP for a in agents)


@given(coord, coord, coord, coord, size, size)
def test_distance_to_matches_grid(px, py, cx, cy, hw, hd):
    import oracles

    o = Obstacle(0, Vec2(cx, cy), hw, hd)
    want = oracles.grid_rect_distance(px, py, cx, cy, hw, hd, n=801)
    # the grid can only overestimate, by at most half a sample step
    step = 2 * max(hw, hd) / 800
    assert want - step <= o.distance_to(Vec2(px, py)) <= want + 1e-9
