import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmmorph.kinematics import MotionCommand, braking_steps, braking_tracks, rotate_toward, step, time_to_stop
from swarmmorph.world import UP, AgentState, Vec2

DT, A_MAX = 0.1, 2.0


def agent(speed=10.0, heading=UP, pos=Vec2(0, 0)):
    return AgentState(0, pos, heading * speed, heading=heading)


def test_steady_state():
    a = step(agent(), MotionCommand(UP, 10.0), DT, A_MAX)
    assert a.speed == 10.0 and a.pos == Vec2(0, 1.0)


def test_linear_ramp():
    a = step(agent(), MotionCommand(UP, 12.0), DT, A_MAX)
    assert a.speed == pytest.approx(10.2)


def test_braking_never_below_zero():
    a = agent()
    a = step(a, MotionCommand(UP, 0.0), DT, A_MAX)
    assert a.speed == pytest.approx(9.8)
    for _ in range(100):
        a = step(a, MotionCommand(UP, 0.0), DT, A_MAX)
        assert a.speed >= 0.0
    assert a.speed == 0.0


def test_time_to_stop():
    assert time_to_stop(10.0, 2.0) == 5.0
    assert time_to_stop(0.0, 2.0) == 0.0


def test_bad_dt_rejected():
    with pytest.raises(ValueError):
        step(agent(), MotionCommand(UP, 1.0), 0.0, A_MAX)


def test_rotate_toward_respects_limit():
    h = rotate_toward(UP, Vec2(1, 0), math.radians(10))
    assert math.degrees(math.acos(h.dot(UP))) == pytest.approx(10)
    assert rotate_toward(UP, Vec2(1, 1), math.pi) == Vec2(1, 1).normalized()


cmd_speed = st.floats(0, 40)
cmd_angle = st.floats(-math.pi, math.pi)


@given(st.floats(0, 12), cmd_speed, cmd_angle, st.floats(0, 30))
def test_speed_band_and_accel_limit(v0, want, angle, extra):
    # the cap is fixed per run, so the agent never starts above it
    cap = v0 + extra
    a = agent(v0)
    cmd = MotionCommand(Vec2(math.sin(angle), math.cos(angle)), want)
    b = step(a, cmd, DT, A_MAX, speed_cap=max(cap, 0.1))
    assert b.speed <= a.max_speed + 1e-9
    assert b.speed <= max(cap, 0.1) + 1e-9
    assert abs(b.speed - a.speed) <= A_MAX * DT + 1e-9


def _error_after(dt, t_end=4.0):
    a = AgentState(0, Vec2(0, 0), Vec2(0, 0), nominal_speed=10, speed_margin=2, heading=UP)
    for _ in range(int(round(t_end / dt))):
        a = step(a, MotionCommand(UP, 12.0), dt, A_MAX)
    exact = 0.5 * A_MAX * t_end**2
    return abs(a.pos.y - exact)


def test_first_order_convergence():
    e1, e2 = _error_after(0.1), _error_after(0.05)
    assert e2 == pytest.approx(e1 / 2, rel=0.05)


def test_braking_tracks_match_step():
    a = agent(9.0)
    tracks = braking_tracks(np.array([[0.0, 0.0]]), np.array([[0.0, 1.0]]), np.array([9.0]), A_MAX, DT, 10)
    cur = a
    for k in range(10):
        assert tracks[0, k, 1] == pytest.approx(cur.pos.y)
        cur = step(cur, MotionCommand(UP, 0.0), DT, A_MAX)


def test_braking_steps_cover_stop():
    assert braking_steps(12.0, 2.0, 0.1) == 62
