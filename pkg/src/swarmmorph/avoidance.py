"""Gap evaluation, obstacle enveloping, waypoint routing, queueing and the
braking-safe command filter used during every phase of flight."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .kinematics import MotionCommand, braking_tracks, rotate_toward
from .world import UP, AgentState, Obstacle, Vec2


class AvoidanceMode(str, enum.Enum):
    SINGLE_OBSTACLE = "SingleObstacle"
    GAP_TRANSIT = "GapTransit"
    ENVELOPED = "Enveloped"


class RouteInfeasible(ValueError):
    pass


def gap_between(o1: Obstacle, o2: Obstacle) -> float:
    """Minimum boundary-to-boundary distance between two rectangles (0 if they overlap)."""
    dx = max(o2.xmin - o1.xmax, o1.xmin - o2.xmax, 0.0)
    dy = max(o2.ymin - o1.ymax, o1.ymin - o2.ymax, 0.0)
    return math.hypot(dx, dy)


def choose_mode(gap: float, dist_safe: float) -> AvoidanceMode:
    if gap < 0:
        raise ValueError("gap must be non-negative")
    return AvoidanceMode.GAP_TRANSIT if gap > dist_safe else AvoidanceMode.ENVELOPED


def envelope(obstacles: Sequence[Obstacle]) -> Obstacle:
    """Bounding box of ``obstacles``, carrying the smallest member id."""
    xmin = min(o.xmin for o in obstacles)
    xmax = max(o.xmax for o in obstacles)
    ymin = min(o.ymin for o in obstacles)
    ymax = max(o.ymax for o in obstacles)
    return Obstacle(
        min(o.id for o in obstacles),
        Vec2((xmin + xmax) / 2, (ymin + ymax) / 2),
        (xmax - xmin) / 2,
        (ymax - ymin) / 2,
    )


@dataclass(frozen=True)
class RouteOption:
    """One way past an obstacle set: around its left or right end, or through a gap.

    ``lane_x`` is the x-coordinate of the lane the agents follow while beside
    the obstacles; ``front``/``back`` bound the obstructed stretch along y.
    """

    index: int
    kind: str  # "left" | "gap" | "right"
    lane_x: float
    front: float
    back: float
    width: float = math.inf
    obstacle_ids: tuple[int, ...] = ()

    @property
    def label(self) -> str:
        return f"{self.kind}@{self.lane_x:.2f}"


@dataclass(frozen=True)
class ObstacleSet:
    obstacles: tuple[Obstacle, ...]
    blocks: tuple[Obstacle, ...]
    routes: tuple[RouteOption, ...]
    mode: AvoidanceMode

    @property
    def center_line(self) -> float:
        """Along-track coordinate agents must pass to have cleared the set."""
        return max(o.center.y for o in self.obstacles)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(o.id for o in self.obstacles))


def build_routes(obstacles: Iterable[Obstacle], dist_safe: float, clearance: float) -> ObstacleSet:
    """Cluster a detected obstacle set into blocks and list the routes past it.

    Neighbouring obstacles are enveloped into one block when the gap between
    them is not wider than ``dist_safe``, when their x-extents overlap, or when
    the lane through the gap could not keep ``clearance`` on both sides.
    The route count equals the population factor of the resulting blocks.
    """
    obs = sorted(obstacles, key=lambda o: (o.center.x, o.id))
    if not obs:
        raise ValueError("empty obstacle set")
    groups: list[list[Obstacle]] = [[obs[0]]]
    any_gap = False
    for o in obs[1:]:
        block = envelope(groups[-1])
        lateral = o.xmin - block.xmax
        mode = choose_mode(gap_between(block, o), dist_safe)
        if mode is AvoidanceMode.ENVELOPED or lateral < 2 * clearance:
            groups[-1].append(o)
        else:
            groups.append([o])
            any_gap = True
    blocks = [envelope(g) for g in groups]
    routes: list[RouteOption] = []
    first, last = blocks[0], blocks[-1]
    routes.append(
        RouteOption(0, "left", first.xmin - clearance, first.ymin, first.ymax,
                    obstacle_ids=tuple(o.id for o in groups[0]))
    )
    for a, b, ga, gb in zip(blocks, blocks[1:], groups, groups[1:]):
        routes.append(
            RouteOption(
                len(routes),
                "gap",
                (a.xmax + b.xmin) / 2,
                min(a.ymin, b.ymin),
                max(a.ymax, b.ymax),
                b.xmin - a.xmax,
                tuple(o.id for o in ga + gb),
            )
        )
    routes.append(
        RouteOption(len(routes), "right", last.xmax + clearance, last.ymin, last.ymax,
                    obstacle_ids=tuple(o.id for o in groups[-1]))
    )
    if len(obs) == 1:
        mode = AvoidanceMode.SINGLE_OBSTACLE
    elif any_gap:
        mode = AvoidanceMode.GAP_TRANSIT
    else:
        mode = AvoidanceMode.ENVELOPED
    return ObstacleSet(tuple(obs), tuple(blocks), tuple(routes), mode)


def plan_route(start: Vec2, route: RouteOption, clearance: float) -> list[Vec2]:
    """Waypoints taking an agent from ``start`` past the obstacle set along ``route``.

    Corner routes run up a lane ``clearance`` outside the corner: the offset
    corner point, then a clearing point ``clearance`` beyond the back face.
    Agents starting inside the obstacle's lateral shadow first visit an
    approach point in front of the offset corner so they never cut across it.
    Gap routes visit an entry point, the gap midpoint and an exit point on
    the gap centreline.
    """
    x = route.lane_x
    approach = Vec2(x, route.front - clearance)
    exit_ = Vec2(x, route.back + clearance)
    if route.kind == "gap":
        if route.width < 2 * clearance:
            raise RouteInfeasible(
                f"gap of {route.width:.2f} m cannot keep {clearance:.2f} m on both sides"
            )
        pts = [approach, Vec2(x, (route.front + route.back) / 2), exit_]
    else:
        in_shadow = start.x > x if route.kind == "left" else start.x < x
        pts = [Vec2(x, route.front), exit_]
        if in_shadow:
            pts.insert(0, approach)
    return [p for p in pts if p.y > start.y] or [exit_]


def merge_queue(agents: Sequence[AgentState], heading: Vec2 = UP) -> list[int]:
    """Queue order on a shared lane: farthest ahead first, lower id on ties."""
    return [a.id for a in sorted(agents, key=lambda a: (-a.pos.dot(heading), a.id))]


def _closing(a_pos: Vec2, a_vel: Vec2, b_pos: Vec2, b_vel: Vec2, dt: float) -> tuple[float, float]:
    """(distance after one tick, closing speed) for two constant-velocity points."""
    pa = a_pos + a_vel * dt
    pb = b_pos + b_vel * dt
    rel = pb - pa
    d = rel.norm()
    if d == 0.0:
        return 0.0, math.inf
    closing = -(b_vel - a_vel).dot(rel) / d
    return d, closing


def disturbance_command(
    agent: AgentState,
    waypoint: Optional[Vec2],
    predecessor: Optional[AgentState],
    neighbors: Sequence[AgentState],
    dist_safe: float,
    a_max: float,
    dt: float,
    heading: Vec2 = UP,
    queue_gap: Optional[float] = None,
) -> MotionCommand:
    """Head for ``waypoint`` at nominal speed, easing off to v - delta and then to a
    stop whenever the one-tick lookahead shows a neighbour coming inside
    ``dist_safe`` (the predecessor inside ``queue_gap``) plus the braking
    distance of the closing speed."""
    target = (waypoint - agent.pos) if waypoint is not None else heading
    if target.norm() < 1e-9:
        target = agent.heading
    direction = target.normalized()
    gap = dist_safe if queue_gap is None else max(queue_gap, dist_safe)
    others = [(o, dist_safe) for o in neighbors if predecessor is None or o.id != predecessor.id]
    if predecessor is not None:
        others.append((predecessor, gap))
    v_i = agent.nominal_speed
    for speed in (v_i, v_i - agent.speed_margin):
        vel = direction * speed
        ok = True
        for o, keep in others:
            d, closing = _closing(agent.pos, vel, o.pos, o.vel, dt)
            need = keep + (closing * closing / (2 * a_max) if closing > 0 else 0.0)
            if d < need - 1e-9:
                ok = False
                break
        if ok:
            return MotionCommand.clamped(direction, speed, agent.max_speed)
    return MotionCommand.clamped(direction, 0.0, agent.max_speed)


# ---------------------------------------------------------------------------
# braking-safe filter


def _rotate(h: Vec2, angle: float) -> Vec2:
    c, s = math.cos(angle), math.sin(angle)
    return Vec2(h.x * c - h.y * s, h.x * s + h.y * c)


def preferred_command(
    agent: AgentState, cmd: MotionCommand, a_max: float, turn_rate: float, dt: float, v_top: float
) -> tuple[Vec2, float]:
    """The reachable (heading, speed) closest to ``cmd``; always the first candidate."""
    v = agent.speed
    dv = a_max * dt
    lo, hi = max(v - dv, 0.0), min(v + dv, v_top)
    return rotate_toward(agent.heading, cmd.desired_heading, turn_rate * dt), min(max(cmd.desired_speed, lo), hi)


def candidate_commands(
    agent: AgentState, cmd: MotionCommand, a_max: float, turn_rate: float, dt: float, v_top: float
) -> list[tuple[Vec2, float]]:
    """Reachable (heading, speed) pairs for the next tick, most preferred first.

    The last resort, braking hard on the current heading, is always included.
    """
    v, h = agent.speed, agent.heading
    dv, dth = a_max * dt, turn_rate * dt
    lo, hi = max(v - dv, 0.0), min(v + dv, v_top)
    want_h, want_v = preferred_command(agent, cmd, a_max, turn_rate, dt, v_top)
    headings = [want_h, h, _rotate(h, dth), _rotate(h, -dth), _rotate(h, dth / 2), _rotate(h, -dth / 2)]
    speeds = [want_v, min(max(v, lo), hi), (want_v + lo) / 2, lo]
    goal = cmd.desired_heading
    out = []
    for hi_, hd in enumerate(headings):
        off = abs(math.atan2(hd.cross(goal), hd.dot(goal))) if goal.norm() > 0 else 0.0
        for si, sp in enumerate(speeds):
            cost = abs(sp - cmd.desired_speed) / dv + off / dth
            out.append((cost, hi_, si, hd, sp))
    out.sort(key=lambda t: (round(t[0], 9), t[1], t[2]))
    cands = [(hd, sp) for _, _, _, hd, sp in out]
    cands.append((h, lo))
    return cands


def rect_clearance(points: np.ndarray, rects: np.ndarray) -> np.ndarray:
    """Distance from each point to each rectangle boundary (0 inside).

    ``points`` (..., 2), ``rects`` (m, 4) as xmin, xmax, ymin, ymax -> (..., m).
    """
    x = points[..., 0:1]
    y = points[..., 1:2]
    dx = np.maximum(np.maximum(rects[:, 0] - x, x - rects[:, 1]), 0.0)
    dy = np.maximum(np.maximum(rects[:, 2] - y, y - rects[:, 3]), 0.0)
    return np.hypot(dx, dy)


def pick_safe(
    next_pos: Vec2,
    candidates: Sequence[tuple[Vec2, float]],
    others: np.ndarray,
    rects: np.ndarray,
    dist_safe: float,
    a_max: float,
    dt: float,
    steps: int,
) -> tuple[int, float]:
    """Index of the first candidate whose braking track stays ``dist_safe`` clear of
    every track in ``others`` (m, steps, 2) and of every rectangle in ``rects``.

    If none qualifies, the candidate with the largest worst-case margin wins.
    Returns (index, margin).
    """
    first = _margins(next_pos, candidates[:1], others, rects, dist_safe, a_max, dt, steps)[0]
    if first >= -1e-9:
        return 0, float(first)
    margin = _margins(next_pos, candidates, others, rects, dist_safe, a_max, dt, steps)
    ok = np.flatnonzero(margin >= -1e-9)
    if len(ok):
        i = int(ok[0])
    else:
        i = int(np.argmax(margin))
    return i, float(margin[i])


def _margins(next_pos, candidates, others, rects, dist_safe, a_max, dt, steps) -> np.ndarray:
    n = len(candidates)
    heads = np.array([c[0].as_tuple() for c in candidates])
    speeds = np.array([c[1] for c in candidates])
    start = np.broadcast_to(np.array(next_pos.as_tuple()), (n, 2))
    tracks = braking_tracks(start, heads, speeds, a_max, dt, steps)
    margin = np.full(n, np.inf)
    if len(others):
        diff = tracks[:, None, :, :] - others[None, :, :, :]
        d = np.sqrt(np.einsum("cmkj,cmkj->cmk", diff, diff))
        margin = np.minimum(margin, d.min(axis=(1, 2)) - dist_safe)
    if len(rects):
        clr = rect_clearance(tracks, rects)
        margin = np.minimum(margin, clr.min(axis=(1, 2)) - dist_safe)
    return margin
