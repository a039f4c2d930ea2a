"""Formation recovery: agent-to-slot correspondence with a zero-bending TPS energy,
and slot tracking until the formation is restored."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .kinematics import MotionCommand
from .world import AgentState, FormationSpec, Vec2


@dataclass(frozen=True)
class AssignmentProblem:
    sources: tuple[Vec2, ...]
    targets: tuple[Vec2, ...]
    lam: float = 0.0

    def __post_init__(self) -> None:
        if len(self.sources) != len(self.targets):
            raise ValueError(
                f"{len(self.sources)} sources but {len(self.targets)} targets"
            )
        if self.lam != 0.0:
            raise NotImplementedError("only the lambda = 0 correspondence energy is supported")

    @property
    def cost(self) -> list[list[float]]:
        return squared_distance_costs(self.sources, self.targets)


@dataclass(frozen=True)
class Assignment:
    mapping: tuple[int, ...]
    total_cost: float

    def __post_init__(self) -> None:
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"mapping {self.mapping} is not a permutation")


def squared_distance_costs(sources: Sequence[Vec2], targets: Sequence[Vec2]) -> list[list[float]]:
    out = []
    for s in sources:
        row = []
        for t in targets:
            dx, dy = t.x - s.x, t.y - s.y
            row.append(dx * dx + dy * dy)
        out.append(row)
    return out


def tps_energy(
    mapping: Sequence[int], sources: Sequence[Vec2], targets: Sequence[Vec2], lam: float = 0.0
) -> float:
    """Sum of squared residuals between each source and its mapped target.

    With ``lam`` = 0 the bending term vanishes, leaving only the correspondence cost.
    """
    if lam != 0.0:
        raise NotImplementedError("bending energy (lam > 0) is not modelled")
    if not (len(mapping) == len(sources) == len(targets)):
        raise ValueError("mapping, sources and targets must have equal length")
    total = 0.0
    for i, j in enumerate(mapping):
        d = targets[j] - sources[i]
        total += d.x * d.x + d.y * d.y
    return total


def hungarian(cost: Sequence[Sequence[float]]) -> list[int]:
    """Minimum-cost perfect matching on a square matrix (row -> column).

    Shortest augmenting paths with dual potentials, O(n^3).
    """
    n = len(cost)
    if any(len(r) != n for r in cost):
        raise ValueError("cost matrix must be square")
    if n == 0:
        return []
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    match = [0] * n
    for j in range(1, n + 1):
        match[p[j] - 1] = j - 1
    return match


def _optimum(cost: Sequence[Sequence[float]], rows: Sequence[int], cols: Sequence[int]) -> float:
    if not rows:
        return 0.0
    sub = [[cost[r][c] for c in cols] for r in rows]
    m = hungarian(sub)
    return sum(sub[i][m[i]] for i in range(len(rows)))


def solve_assignment(problem: AssignmentProblem | Sequence[Sequence[float]], rtol: float = 1e-9) -> Assignment:
    """Globally optimal bijection; among optimal mappings the lexicographically
    smallest (compared row by row) is returned so results are reproducible."""
    cost = problem.cost if isinstance(problem, AssignmentProblem) else [list(r) for r in problem]
    n = len(cost)
    if any(len(r) != n for r in cost):
        raise ValueError("cost matrix must be square")
    if n == 0:
        return Assignment((), 0.0)
    best = _optimum(cost, range(n), range(n))
    tol = rtol * max(1.0, abs(best))
    free = list(range(n))
    mapping: list[int] = []
    spent = 0.0
    for i in range(n):
        rest_rows = list(range(i + 1, n))
        for j in free:
            cols = [c for c in free if c != j]
            if spent + cost[i][j] + _optimum(cost, rest_rows, cols) <= best + tol:
                mapping.append(j)
                spent += cost[i][j]
                free.remove(j)
                break
        else:  # pragma: no cover - the optimum is always reachable
            raise RuntimeError("lexicographic refinement lost the optimum")
    total = sum(cost[i][mapping[i]] for i in range(n))
    return Assignment(tuple(mapping), total)


def centroid(points: Sequence[Vec2]) -> Vec2:
    n = len(points)
    return Vec2(sum(p.x for p in points) / n, sum(p.y for p in points) / n)


def next_swarm_location(
    positions: Sequence[Vec2], goal: Vec2, formation: FormationSpec, lookahead: float
) -> tuple[Vec2, list[Vec2]]:
    """Anchor one lookahead step from the centroid toward the goal, plus its slots."""
    c = centroid(positions)
    to_goal = goal - c
    dist = to_goal.norm()
    anchor = goal if dist <= lookahead else c + to_goal * (lookahead / dist)
    return anchor, formation.placed(anchor)


def slot_command(
    agent: AgentState, slot: Vec2, anchor_vel: Vec2, gain: float, a_max: float, fallback: Vec2
) -> MotionCommand:
    """Velocity that rides along with the anchor while closing on ``slot``."""
    err = slot - agent.pos
    e = err.norm()
    corr = min(gain * e, math.sqrt(a_max * e)) if e > 0 else 0.0
    want = anchor_vel + (err * (corr / e) if e > 0 else Vec2(0.0, 0.0))
    speed = want.norm()
    heading = want.normalized() if speed > 1e-6 else (anchor_vel.normalized() if anchor_vel.norm() > 0 else fallback)
    return MotionCommand.clamped(heading, speed, agent.max_speed)


def formation_errors(positions: Sequence[Vec2], mapping: Sequence[int], slots: Sequence[Vec2]) -> list[float]:
    return [(slots[mapping[i]] - p).norm() for i, p in enumerate(positions)]


def is_converged(
    positions: Sequence[Vec2], mapping: Sequence[int], slots: Sequence[Vec2], epsilon: float
) -> bool:
    """Every agent within ``epsilon`` of its slot and every pairwise distance
    within 2*epsilon of the corresponding slot spacing."""
    if max(formation_errors(positions, mapping, slots), default=0.0) > epsilon:
        return False
    n = len(positions)
    for i in range(n):
        for j in range(i + 1, n):
            got = (positions[i] - positions[j]).norm()
            want = (slots[mapping[i]] - slots[mapping[j]]).norm()
            if abs(got - want) > 2 * epsilon:
                return False
    return True


def reformation_tick(
    agents: Sequence[AgentState],
    mapping: Sequence[int],
    slots: Sequence[Vec2],
    anchor_vel: Vec2,
    epsilon: float,
    gain: float = 0.5,
    a_max: float = 2.0,
) -> tuple[list[MotionCommand], bool]:
    """Slot-tracking commands for every agent and whether the formation is restored."""
    fallback = anchor_vel.normalized() if anchor_vel.norm() > 0 else Vec2(0.0, 1.0)
    cmds = [slot_command(a, slots[mapping[i]], anchor_vel, gain, a_max, fallback) for i, a in enumerate(agents)]
    converged = is_converged([a.pos for a in agents], mapping, slots, epsilon)
    return cmds, converged
