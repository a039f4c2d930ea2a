"""Congestion-aware splitting of a swarm (or one of its groups) across the
routes past an obstacle set, and local leader nomination."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Protocol, Sequence

from .world import UP, AgentState, Vec2


class NoFeasiblePlan(RuntimeError):
    pass


def population_factor(obs_count: int) -> int:
    if obs_count < 0:
        raise ValueError("obstacle count must be non-negative")
    return obs_count + 1


@dataclass(frozen=True)
class Candidate:
    """Agents split into contiguous lateral blocks, one block per route (left to right)."""

    sizes: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]

    @property
    def imbalance(self) -> tuple[int, int]:
        return (max(self.sizes) - min(self.sizes), sum(s * s for s in self.sizes))


def compositions(n: int, parts: int) -> list[tuple[int, ...]]:
    """All ordered ways of writing ``n`` as ``parts`` non-negative integers, ascending."""
    if parts < 1:
        raise ValueError("need at least one part")
    out = []
    for bars in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        sizes = []
        for b in bars:
            sizes.append(b - prev - 1)
            prev = b
        sizes.append(n + parts - 1 - prev - 1)
        out.append(tuple(sizes))
    return sorted(out)


def lateral_order(agents: Sequence[AgentState], heading: Vec2 = UP, bias: float = 0.0) -> list[AgentState]:
    """Agents from left to right across ``heading``.

    Agents level with each other are ordered so the one farther ahead sits
    toward the outside of the group. On the group's centre line the one
    farther ahead goes toward the roomier side, i.e. away from ``bias`` (the
    lateral offset of the obstacles). Both rules flip with the scene, so a
    mirrored swarm yields exactly the reversed order.
    """
    right = heading.right()
    lat = {a.id: a.pos.dot(right) for a in agents}
    centre = sum(lat.values()) / len(agents)
    lean = (bias < 0) - (bias > 0)

    def key(a: AgentState):
        off = lat[a.id] - centre
        side = (off > 0) - (off < 0) or lean
        return (lat[a.id], a.pos.dot(heading) * side, a.id)

    return sorted(agents, key=key)


def enumerate_splits(
    agents: Sequence[AgentState], n_routes: int, heading: Vec2 = UP, bias: float = 0.0
) -> list[Candidate]:
    if not agents:
        raise ValueError("cannot split an empty agent list")
    ordered = [a.id for a in lateral_order(agents, heading, bias)]
    out = []
    for sizes in compositions(len(ordered), n_routes):
        groups, i = [], 0
        for s in sizes:
            groups.append(tuple(ordered[i : i + s]))
            i += s
        out.append(Candidate(sizes, tuple(groups)))
    return out


class PlanningSnapshot(Protocol):
    """Frozen view of the world a candidate can be played forward from."""

    def surrogate_transit(self, candidate: Candidate, budget: float) -> float: ...

    def unobstructed_transit(self) -> float: ...


def predict_transit_time(candidate: Candidate, snapshot: PlanningSnapshot, budget_factor: float = 10.0) -> float:
    """Simulated time until every member has passed the obstacle centre line.

    Returns ``math.inf`` if that does not happen within ``budget_factor``
    times the unobstructed transit time.
    """
    budget = budget_factor * max(snapshot.unobstructed_transit(), 1.0)
    return snapshot.surrogate_transit(candidate, budget)


def _same(a: float, b: float) -> bool:
    return a == b or abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))


def select_index(candidates: Sequence[Candidate], times: Sequence[float]) -> int:
    """Fastest candidate; ties go to the more balanced split, then the lower index."""
    if len(candidates) != len(times):
        raise ValueError("one time per candidate required")
    finite = [i for i, t in enumerate(times) if math.isfinite(t)]
    if not finite:
        raise NoFeasiblePlan("every candidate split is blocked")
    best = min(times[i] for i in finite)
    tied = [i for i in finite if _same(times[i], best)]
    return min(tied, key=lambda i: (candidates[i].imbalance, i))


@dataclass(frozen=True)
class GroupPlan:
    partition: dict[int, str]
    leaders: dict[str, int]
    predicted_time: float
    route: dict[str, str] = field(default_factory=dict)
    sizes: tuple[int, ...] = ()
    candidate_index: int = -1
    times: tuple[float, ...] = ()

    def members(self, tag: str) -> list[int]:
        return sorted(i for i, t in self.partition.items() if t == tag)


def group_tags(candidate: Candidate, parent: str = "N") -> list[Optional[str]]:
    """Tag per route; empty routes get ``None`` and non-empty ones are numbered in order."""
    tags, k = [], 0
    for g in candidate.groups:
        if g:
            k += 1
            tags.append(f"{parent}{k}")
        else:
            tags.append(None)
    return tags


def nominate_leaders(
    groups: Mapping[str, Sequence[int]], agents: Mapping[int, AgentState], heading: Vec2 = UP
) -> dict[str, int]:
    """Per group, the member farthest ahead along ``heading`` (lowest id on ties)."""
    out = {}
    for tag, ids in groups.items():
        if not ids:
            raise ValueError(f"group {tag} is empty")
        out[tag] = min(ids, key=lambda i: (-agents[i].pos.dot(heading), i))
    return out


def select_plan(
    candidates: Sequence[Candidate],
    times: Sequence[float],
    agents: Mapping[int, AgentState],
    route_labels: Sequence[str] = (),
    parent: str = "N",
    heading: Vec2 = UP,
) -> GroupPlan:
    idx = select_index(candidates, times)
    return plan_from_candidate(candidates[idx], agents, route_labels, parent, heading, times[idx], idx, times)


def plan_from_candidate(
    cand: Candidate,
    agents: Mapping[int, AgentState],
    route_labels: Sequence[str] = (),
    parent: str = "N",
    heading: Vec2 = UP,
    predicted: float = math.nan,
    idx: int = -1,
    times: Sequence[float] = (),
) -> GroupPlan:
    tags = group_tags(cand, parent)
    partition, groups, routes = {}, {}, {}
    for r, (tag, ids) in enumerate(zip(tags, cand.groups)):
        if tag is None:
            continue
        groups[tag] = ids
        routes[tag] = route_labels[r] if r < len(route_labels) else str(r)
        for i in ids:
            partition[i] = tag
    return GroupPlan(
        partition,
        nominate_leaders(groups, agents, heading),
        predicted,
        routes,
        cand.sizes,
        idx,
        tuple(times),
    )
