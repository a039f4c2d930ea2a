"""Shared domain types: planar vectors, agents, obstacles, formations and config."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite vector ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> Vec2:
        return Vec2(self.x / k, self.y / k)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def normalized(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            return Vec2(0.0, 0.0)
        return Vec2(self.x / n, self.y / n)

    def right(self) -> Vec2:
        """Perpendicular pointing to the right of this direction."""
        return Vec2(self.y, -self.x)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


UP = Vec2(0.0, 1.0)


class Phase(str, enum.Enum):
    FORMATION = "Formation"
    DISTURBANCE = "Disturbance"
    CONVERGENCE = "Convergence"


@dataclass(frozen=True, slots=True)
class AgentState:
    id: int
    pos: Vec2
    vel: Vec2
    nominal_speed: float = 10.0
    speed_margin: float = 2.0
    group_id: Optional[str] = None
    is_leader: bool = False
    phase: Phase = Phase.FORMATION
    # kept separately so a hovering agent still knows where it faces
    heading: Vec2 = UP

    @property
    def speed(self) -> float:
        return self.vel.norm()

    @property
    def max_speed(self) -> float:
        return self.nominal_speed + self.speed_margin

    def with_(self, **changes) -> AgentState:
        return replace(self, **changes)


@dataclass(frozen=True, slots=True)
class Obstacle:
    """Axis-aligned rectangle; half_width spans x, half_depth spans y."""

    id: int
    center: Vec2
    half_width: float
    half_depth: float

    def __post_init__(self) -> None:
        if not self.half_width > 0:
            raise ValueError(f"obstacle {self.id}: half_width must be > 0, got {self.half_width}")
        if not self.half_depth > 0:
            raise ValueError(f"obstacle {self.id}: half_depth must be > 0, got {self.half_depth}")

    @property
    def xmin(self) -> float:
        return self.center.x - self.half_width

    @property
    def xmax(self) -> float:
        return self.center.x + self.half_width

    @property
    def ymin(self) -> float:
        return self.center.y - self.half_depth

    @property
    def ymax(self) -> float:
        return self.center.y + self.half_depth

    def distance_to(self, p: Vec2) -> float:
        """Distance from ``p`` to the nearest boundary point (0 inside)."""
        dx = max(abs(p.x - self.center.x) - self.half_width, 0.0)
        dy = max(abs(p.y - self.center.y) - self.half_depth, 0.0)
        return math.hypot(dx, dy)

    def nearest_point(self, p: Vec2) -> Vec2:
        return Vec2(min(max(p.x, self.xmin), self.xmax), min(max(p.y, self.ymin), self.ymax))

    def contains(self, p: Vec2) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax


def rect_edges(o: Obstacle, heading: Vec2 = UP) -> tuple[Vec2, Vec2]:
    """Front corners of ``o`` as seen by a swarm moving along ``heading``, left first.

    Only axis-aligned headings are meaningful for axis-aligned rectangles.
    """
    h = heading.normalized()
    r = h.right()
    front = o.center - h * _extent(o, h)
    side = r * _extent(o, r)
    return front - side, front + side


def _extent(o: Obstacle, d: Vec2) -> float:
    return abs(d.x) * o.half_width + abs(d.y) * o.half_depth


@dataclass(frozen=True)
class FormationSpec:
    slots: tuple[Vec2, ...]
    heading: Vec2 = UP
    inter_agent_distance: float = 6.0

    def __post_init__(self) -> None:
        if self.inter_agent_distance <= 0:
            raise ValueError("inter_agent_distance must be > 0")
        if abs(self.heading.norm() - 1.0) > 1e-9:
            raise ValueError("formation heading must be a unit vector")
        tol = 1e-9 * max(1.0, self.inter_agent_distance)
        for i, a in enumerate(self.slots):
            for j in range(i + 1, len(self.slots)):
                d = (a - self.slots[j]).norm()
                if d < self.inter_agent_distance - tol:
                    raise ValueError(
                        f"slots {i} and {j} are {d:.3f} m apart, "
                        f"below inter_agent_distance {self.inter_agent_distance}"
                    )

    def __len__(self) -> int:
        return len(self.slots)

    def placed(self, anchor: Vec2) -> list[Vec2]:
        """Slot positions for a formation centred on ``anchor``.

        Offsets are expressed with +y along ``heading``.
        """
        fwd = self.heading
        rgt = fwd.right()
        return [anchor + rgt * s.x + fwd * s.y for s in self.slots]

    def mirrored(self) -> FormationSpec:
        return FormationSpec(
            tuple(Vec2(-s.x, s.y) for s in self.slots),
            self.heading,
            self.inter_agent_distance,
        )


def nested_v(n: int, spacing: float = 6.0) -> FormationSpec:
    """Nested V: apex in front, rows of a checkerboard lattice behind it.

    Every slot's nearest neighbour sits exactly ``spacing`` away. Offsets are
    centred on the formation centroid.
    """
    if n < 1:
        raise ValueError("formation needs at least one slot")
    s = spacing / math.sqrt(2.0)
    cells: list[tuple[int, int]] = []
    row = 0
    while len(cells) < n:
        cols = [i for i in range(-row, row + 1) if (i + row) % 2 == 0]
        cols.sort(key=lambda i: (abs(i), i))
        cells.extend((i, row) for i in cols)
        row += 1
    cells = cells[:n]
    pts = [(i * s, -j * s) for i, j in cells]
    cx = sum(p[0] for p in pts) / n
    cy = sum(p[1] for p in pts) / n
    return FormationSpec(tuple(Vec2(x - cx, y - cy) for x, y in pts), UP, spacing)


@dataclass(frozen=True)
class SwarmConfig:
    n_agents: int
    formation: FormationSpec
    goal: Vec2
    start: Vec2 = Vec2(0.0, 0.0)
    detection_range: float = 30.0
    dist_safe: float = 2.0
    g: float = 9.81
    c_d: float = 0.3
    t_c: float = 0.0
    dt: float = 0.1
    nominal_speed: float = 10.0
    speed_margin: float = 2.0
    speed_cap: float = 20.0
    a_max: float = 2.0
    turn_rate: float = math.pi / 2
    danger_margin: Optional[float] = None
    route_margin: float = 1.0
    epsilon: float = 0.5
    lookahead: Optional[float] = None
    formation_gain: float = 0.5

    def __post_init__(self) -> None:
        checks = [
            ("n_agents", self.n_agents >= 1),
            ("dist_safe", self.dist_safe > 0),
            ("detection_range", self.detection_range > self.dist_safe),
            ("dt", self.dt > 0),
            ("g", self.g > 0),
            ("c_d", self.c_d > 0),
            ("t_c", self.t_c >= 0),
            ("nominal_speed", self.nominal_speed > 0),
            ("speed_margin", 0 <= self.speed_margin < self.nominal_speed),
            ("speed_cap", self.speed_cap > 0),
            ("a_max", self.a_max > 0),
            ("turn_rate", self.turn_rate > 0),
            ("route_margin", self.route_margin >= 0),
            ("epsilon", self.epsilon > 0),
            ("danger_margin", self.danger_margin is None or self.danger_margin >= 0),
            ("lookahead", self.lookahead is None or self.lookahead >= 0),
            ("formation_gain", self.formation_gain > 0),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid {name}: {getattr(self, name)!r}")
        if len(self.formation) != self.n_agents:
            raise ValueError(
                f"formation has {len(self.formation)} slots for {self.n_agents} agents"
            )

    @property
    def max_speed(self) -> float:
        return min(self.nominal_speed + self.speed_margin, self.speed_cap)

    @property
    def clearance(self) -> float:
        """Lateral offset used when planning waypoints around obstacles."""
        return self.dist_safe + self.route_margin

    @property
    def zone_margin(self) -> float:
        return self.dist_safe if self.danger_margin is None else self.danger_margin

    @property
    def anchor_lookahead(self) -> float:
        return self.nominal_speed * self.dt if self.lookahead is None else self.lookahead

    @property
    def heading(self) -> Vec2:
        return self.formation.heading

    def with_(self, **changes) -> SwarmConfig:
        return replace(self, **changes)


def initial_agents(cfg: SwarmConfig) -> list[AgentState]:
    """Agents sitting on their slots, cruising at nominal speed."""
    h = cfg.heading
    return [
        AgentState(
            id=i,
            pos=p,
            vel=h * cfg.nominal_speed,
            nominal_speed=cfg.nominal_speed,
            speed_margin=cfg.speed_margin,
            heading=h,
        )
        for i, p in enumerate(cfg.formation.placed(cfg.start))
    ]


def mirror_scenario(
    cfg: SwarmConfig,
    obstacles: Sequence[Obstacle],
    centerline: Optional[float] = None,
) -> tuple[SwarmConfig, list[Obstacle]]:
    """Reflect every x-coordinate about the swarm centerline (default: start x)."""
    c = cfg.start.x if centerline is None else centerline

    def flip(v: Vec2) -> Vec2:
        return Vec2(2.0 * c - v.x, v.y)

    new_cfg = cfg.with_(
        start=flip(cfg.start),
        goal=flip(cfg.goal),
        formation=cfg.formation.mirrored(),
    )
    new_obs = [replace(o, center=flip(o.center)) for o in obstacles]
    return new_cfg, new_obs


@dataclass(frozen=True)
class Scenario:
    """Everything needed to run one mission."""

    cfg: SwarmConfig
    obstacles: tuple[Obstacle, ...] = field(default_factory=tuple)
    name: str = "scenario"

    def mirrored(self) -> Scenario:
        cfg, obs = mirror_scenario(self.cfg, self.obstacles)
        return Scenario(cfg, tuple(obs), self.name + "-mirrored")
