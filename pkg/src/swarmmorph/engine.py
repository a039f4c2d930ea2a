"""Discrete-time mission engine: phase machine, per-tick command/commit loop,
metrics and energy accounting."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import avoidance, grouping, kinematics, reformation
from .avoidance import ObstacleSet, RouteOption
from .energy import EnergyLedger, PowerModel, accumulate
from .grouping import Candidate, GroupPlan
from .kinematics import MotionCommand
from .world import AgentState, Obstacle, Phase, Scenario, Vec2, initial_agents

ROOT = "N"
FOLLOW_RANGE = 3.0  # trail the predecessor when within this many formation spacings

ALLOWED_TRANSITIONS = {
    (Phase.FORMATION, Phase.DISTURBANCE),
    (Phase.DISTURBANCE, Phase.CONVERGENCE),
    (Phase.CONVERGENCE, Phase.FORMATION),
    (Phase.CONVERGENCE, Phase.DISTURBANCE),
}


class Strategy(str, enum.Enum):
    PROPOSED = "proposed"
    SHORTEST_PATH = "shortest_path"


@dataclass
class AgentRoute:
    waypoints: list[Vec2]
    index: int = 0
    lane: Optional[tuple[float, float]] = None

    @property
    def current(self) -> Optional[Vec2]:
        return self.waypoints[self.index] if self.index < len(self.waypoints) else None

    @property
    def last(self) -> Optional[Vec2]:
        return self.waypoints[-1] if self.waypoints else None


@dataclass
class TransitEvent:
    """One grouping decision and the transit it triggered."""

    event_id: int
    group: str
    members: tuple[int, ...]
    obstacle_ids: tuple[int, ...]
    center_line: float
    tick: int
    t_detect: float
    plan: Optional[GroupPlan] = None
    mode: str = ""
    crossings: dict[int, float] = field(default_factory=dict)

    @property
    def t_done(self) -> Optional[float]:
        if len(self.crossings) < len(self.members):
            return None
        return max(self.crossings.values())

    @property
    def duration(self) -> Optional[float]:
        done = self.t_done
        return None if done is None else done - self.t_detect


@dataclass
class MetricsSeries:
    tick: list[int] = field(default_factory=list)
    time: list[float] = field(default_factory=list)
    mean_speed: list[float] = field(default_factory=list)
    std_speed: list[float] = field(default_factory=list)
    mean_nn_dist: list[float] = field(default_factory=list)
    std_nn_dist: list[float] = field(default_factory=list)
    min_pair_dist: list[float] = field(default_factory=list)
    min_obstacle_clearance: list[float] = field(default_factory=list)
    phase: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tick)

    def append(self, row: dict) -> None:
        for k, v in row.items():
            getattr(self, k).append(v)


@dataclass
class SimulationState:
    tick: int
    time: float
    agents: list[AgentState]
    phase: Phase
    active_plan: Optional[GroupPlan] = None
    rng_seed: int = 0


def metrics_tick(agents: Sequence[AgentState]) -> dict:
    """Speed and spacing statistics for one snapshot (needs at least two agents)."""
    if len(agents) < 2:
        raise ValueError("metrics need at least two agents")
    pos = np.array([a.pos.as_tuple() for a in agents])
    speeds = np.array([a.speed for a in agents])
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.sqrt((diff**2).sum(-1))
    np.fill_diagonal(d, np.inf)
    nn = d.min(axis=1)
    return {
        "mean_speed": float(speeds.mean()),
        "std_speed": float(speeds.std()),
        "mean_nn_dist": float(nn.mean()),
        "std_nn_dist": float(nn.std()),
        "min_pair_dist": float(d.min()),
    }


def obstacle_clearance(agents: Sequence[AgentState], obstacles: Sequence[Obstacle]) -> float:
    if not obstacles:
        return math.inf
    return min(o.distance_to(a.pos) for a in agents for o in obstacles)


class Simulation:
    """Mutable world state advanced one tick at a time.

    A surrogate copy (see :meth:`fork`) replays the same dynamics with
    recording, energy and re-planning switched off; grouping uses it to
    predict transit times.
    """

    def __init__(
        self,
        scenario: Scenario,
        power_model: Optional[PowerModel] = None,
        strategy: Strategy | str = Strategy.PROPOSED,
        forced_split: Optional[Sequence[int]] = None,
        record: bool = True,
        budget_factor: float = 10.0,
    ):
        self.scenario = scenario
        self.cfg = scenario.cfg
        self.obstacles: tuple[Obstacle, ...] = tuple(scenario.obstacles)
        self._obs_by_id = {o.id: o for o in self.obstacles}
        self._rects = np.array([[o.xmin, o.xmax, o.ymin, o.ymax] for o in self.obstacles]).reshape(-1, 4)
        self.power_model = power_model or PowerModel()
        self.strategy = Strategy(strategy)
        self.forced_split = tuple(forced_split) if forced_split is not None else None
        self.record = record
        self.budget_factor = budget_factor
        self.surrogate = False

        self.agents: list[AgentState] = initial_agents(self.cfg)
        self.tick_count = 0
        self.time = 0.0
        self.phase = Phase.FORMATION
        self.anchor = self.cfg.start
        self.anchor_speed = self.cfg.nominal_speed
        self.mapping: list[int] = list(range(self.cfg.n_agents))
        self.routes: dict[int, AgentRoute] = {}
        self.planned: dict[str, set[int]] = {}
        self.leaders: dict[str, int] = {}
        self.events: list[TransitEvent] = []
        self.active_plan: Optional[GroupPlan] = None
        self.reassignments = 0
        self.converged_at: Optional[float] = None

        self.phase_log: list[tuple[int, Phase]] = [(0, self.phase)]
        self.ledger = EnergyLedger.empty(self.cfg.n_agents)
        self.transit_ledger = EnergyLedger.empty(self.cfg.n_agents)
        self.metrics = MetricsSeries()
        self.trace: list[tuple] = []
        self.leader_changes: list[int] = []
        self.finished = False
        self.incomplete = False
        self._steps = kinematics.braking_steps(self.cfg.max_speed, self.cfg.a_max, self.cfg.dt)

    # ------------------------------------------------------------------ views

    @property
    def state(self) -> SimulationState:
        return SimulationState(self.tick_count, self.time, list(self.agents), self.phase, self.active_plan)

    def along(self, p: Vec2) -> float:
        return p.dot(self.cfg.heading)

    def goal_slots(self) -> list[Vec2]:
        return self.cfg.formation.placed(self.cfg.goal)

    def slots(self) -> list[Vec2]:
        return self.cfg.formation.placed(self.anchor)

    def _passed(self, a: AgentState, o: Obstacle) -> bool:
        return a.pos.y > o.ymax + self.cfg.dist_safe

    def _visible(self) -> list[set[int]]:
        r = self.cfg.detection_range
        return [
            {o.id for o in self.obstacles if o.distance_to(a.pos) <= r and not self._passed(a, o)}
            for a in self.agents
        ]

    def _groups(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for a in self.agents:
            if a.group_id is not None:
                out.setdefault(a.group_id, []).append(a.id)
        return out

    # ------------------------------------------------------------- lifecycle

    def fork(self) -> Simulation:
        """Copy of the current state for look-ahead simulation."""
        twin = object.__new__(Simulation)
        twin.__dict__.update(self.__dict__)
        twin.agents = list(self.agents)
        twin.mapping = list(self.mapping)
        twin.routes = {k: AgentRoute(list(r.waypoints), r.index, r.lane) for k, r in self.routes.items()}
        twin.planned = {k: set(v) for k, v in self.planned.items()}
        twin.leaders = dict(self.leaders)
        twin.events = []
        twin.surrogate = True
        twin.record = False
        twin.phase_log = []
        twin.leader_changes = []
        return twin

    def _set_phase(self, new: Phase) -> None:
        if new == self.phase:
            return
        if (self.phase, new) not in ALLOWED_TRANSITIONS:
            raise RuntimeError(f"illegal phase transition {self.phase} -> {new}")
        self.phase = new
        self.phase_log.append((self.tick_count, new))

    def _enter_disturbance(self, seen: set[int]) -> None:
        self._set_phase(Phase.DISTURBANCE)
        self.routes = {}
        self.planned = {ROOT: set()}
        self.agents = [a.with_(group_id=ROOT, phase=Phase.DISTURBANCE, is_leader=False) for a in self.agents]
        self._plan_group(ROOT, [a.id for a in self.agents], seen)

    def _enter_convergence(self) -> None:
        self._set_phase(Phase.CONVERGENCE)
        cfg = self.cfg
        self.agents = [a.with_(group_id=None, is_leader=False, phase=Phase.CONVERGENCE) for a in self.agents]
        self.routes = {}
        self.planned = {}
        self.leaders = {}
        positions = [a.pos for a in self.agents]
        self.anchor, slots = reformation.next_swarm_location(positions, cfg.goal, cfg.formation, cfg.anchor_lookahead)
        self.anchor_speed = min(self.agents_mean_speed(), cfg.nominal_speed)
        problem = reformation.AssignmentProblem(tuple(positions), tuple(slots))
        self.mapping = list(reformation.solve_assignment(problem).mapping)
        self.reassignments += 1

    def agents_mean_speed(self) -> float:
        return sum(a.speed for a in self.agents) / len(self.agents)

    # -------------------------------------------------------------- planning

    def _plan_group(self, tag: str, members: list[int], obstacle_ids: set[int]) -> None:
        cfg = self.cfg
        obs = [self._obs_by_id[i] for i in sorted(obstacle_ids)]
        oset = avoidance.build_routes(obs, cfg.dist_safe, cfg.clearance)
        by_id = {a.id: a for a in self.agents}
        member_agents = [by_id[i] for i in members]
        bias = self._obstacle_bias(member_agents, oset)
        candidates = grouping.enumerate_splits(member_agents, len(oset.routes), cfg.heading, bias)
        labels = [r.label for r in oset.routes]
        event = TransitEvent(
            len(self.events), tag, tuple(sorted(members)), oset.ids, oset.center_line,
            self.tick_count, self.time, mode=oset.mode.value,
        )
        first_root = tag == ROOT and not any(e.group == ROOT for e in self.events)
        if self.strategy is Strategy.SHORTEST_PATH:
            cand = self._nearest_route_split(member_agents, oset)
            plan = grouping.plan_from_candidate(cand, by_id, labels, tag, cfg.heading)
        elif self.forced_split is not None and first_root:
            sizes = tuple(self.forced_split)
            match = [i for i, c in enumerate(candidates) if c.sizes == sizes]
            if not match:
                raise ValueError(f"split {sizes} does not fit {len(members)} agents over {len(oset.routes)} routes")
            plan = grouping.plan_from_candidate(candidates[match[0]], by_id, labels, tag, cfg.heading, idx=match[0])
        else:
            snap = _Snapshot(self, tag, members, oset)
            times = [grouping.predict_transit_time(c, snap, self.budget_factor) for c in candidates]
            plan = grouping.select_plan(candidates, times, by_id, labels, tag, cfg.heading)
        event.plan = plan
        self._apply_plan(tag, plan, oset, event.event_id)
        self.events.append(event)
        self.active_plan = plan
        self._crossing_check(event, None)

    def _obstacle_bias(self, agents: list[AgentState], oset: ObstacleSet) -> float:
        """Lateral offset of the obstacle set's middle from the group's centroid."""
        right = self.cfg.heading.right()
        lo = min(b.xmin for b in oset.blocks)
        hi = max(b.xmax for b in oset.blocks)
        mid = Vec2((lo + hi) / 2, 0.0).dot(right)
        return mid - sum(a.pos.dot(right) for a in agents) / len(agents)

    def _nearest_route_split(self, agents: list[AgentState], oset: ObstacleSet) -> Candidate:
        """Each agent takes the route whose corner or gap mouth is closest to it."""
        c = self.cfg.clearance
        ends = []
        for r in oset.routes:
            if r.kind == "left":
                ends.append(Vec2(r.lane_x + c, r.front))
            elif r.kind == "right":
                ends.append(Vec2(r.lane_x - c, r.front))
            else:
                ends.append(Vec2(r.lane_x, r.front))
        groups: list[list[int]] = [[] for _ in oset.routes]
        for a in grouping.lateral_order(agents, self.cfg.heading, self._obstacle_bias(agents, oset)):
            k = min(range(len(ends)), key=lambda j: ((ends[j] - a.pos).norm(), j))
            groups[k].append(a.id)
        return Candidate(tuple(len(g) for g in groups), tuple(tuple(g) for g in groups))

    def _apply_plan(self, tag: str, plan: GroupPlan, oset: ObstacleSet, event_id: int) -> None:
        route_of = {r.label: r for r in oset.routes}
        base = self.planned.get(tag, set())
        by_id = {a.id: a for a in self.agents}
        for child, label in plan.route.items():
            self.planned[child] = set(base) | set(oset.ids)
            route: RouteOption = route_of[label]
            for i in plan.members(child):
                old = self.routes.get(i)
                remaining = old.waypoints[old.index :] if old else []
                start = remaining[-1] if remaining else by_id[i].pos
                pts = avoidance.plan_route(start, route, self.cfg.clearance)
                self.routes[i] = AgentRoute(remaining + pts, 0, (route.lane_x, route.front))
        old_leaders = set(self.leaders.values())
        for child in plan.route:
            self.leaders.pop(tag, None)
        self.leaders.update(plan.leaders)
        leader_ids = set(self.leaders.values())
        self.agents = [
            a.with_(
                group_id=plan.partition.get(a.id, a.group_id),
                is_leader=a.id in leader_ids,
            )
            for a in self.agents
        ]
        if leader_ids != old_leaders:
            self.leader_changes.append(self.tick_count)

    # ------------------------------------------------------------- commands

    def _advance_waypoints(self) -> None:
        cap = max(self.cfg.dist_safe, 1.0)
        for a in self.agents:
            r = self.routes.get(a.id)
            while r is not None and r.current is not None:
                wp = r.current
                if (wp - a.pos).norm() <= cap or a.pos.y >= wp.y:
                    r.index += 1
                else:
                    break

    def _desired(self) -> list[MotionCommand]:
        cfg = self.cfg
        if self.phase is Phase.DISTURBANCE:
            return self._disturbance_commands()
        anchor_vel = self.anchor_direction() * self.anchor_speed
        slots = self.slots()
        cmds, _ = reformation.reformation_tick(
            self.agents, self.mapping, slots, anchor_vel, cfg.epsilon, cfg.formation_gain, cfg.a_max
        )
        return cmds

    def _disturbance_commands(self) -> list[MotionCommand]:
        """Queue heads steer for their waypoints; everyone else on a lane trails
        the agent ahead of it by one formation spacing."""
        cfg = self.cfg
        self._advance_waypoints()
        lanes: dict[tuple[float, float], list[AgentState]] = {}
        for a in self.agents:
            r = self.routes.get(a.id)
            if r is not None and r.lane is not None and r.current is not None:
                lanes.setdefault(r.lane, []).append(a)
        pred: dict[int, AgentState] = {}
        by_id = {a.id: a for a in self.agents}
        for members in lanes.values():
            order = avoidance.merge_queue(members, cfg.heading)
            for ahead, behind in zip(order, order[1:]):
                pred[behind] = by_id[ahead]
        gap = cfg.formation.inter_agent_distance
        reach = cfg.dist_safe + cfg.nominal_speed
        cmds = []
        for a in self.agents:
            p = pred.get(a.id)
            if p is not None and (p.pos - a.pos).norm() <= FOLLOW_RANGE * gap:
                slot = p.pos - p.heading * gap
                cmds.append(reformation.slot_command(a, slot, p.vel, cfg.formation_gain, cfg.a_max, p.heading))
                continue
            r = self.routes.get(a.id)
            wp = r.current if r is not None else None
            rank = (-self.along(a.pos), a.id)
            near = [
                o for o in self.agents
                if (-self.along(o.pos), o.id) < rank
                and (o.pos - a.pos).norm() < reach
                and (o.pos - a.pos).dot(a.heading) > 0
            ]
            cmds.append(
                avoidance.disturbance_command(
                    a, wp, p, near, cfg.dist_safe, cfg.a_max, cfg.dt, cfg.heading, gap
                )
            )
        return cmds

    def _safe(self, desired: list[MotionCommand]) -> list[tuple[Vec2, float]]:
        cfg = self.cfg
        dt, a_max, K = cfg.dt, cfg.a_max, self._steps
        n = len(self.agents)
        pos = np.array([a.pos.as_tuple() for a in self.agents])
        vel = np.array([a.vel.as_tuple() for a in self.agents])
        head = np.array([a.heading.as_tuple() for a in self.agents])
        speed = np.hypot(vel[:, 0], vel[:, 1])
        nxt = pos + vel * dt
        brake = np.maximum(speed - a_max * dt, 0.0)
        tracks = kinematics.braking_tracks(nxt, head, brake, a_max, dt, K)
        reach = speed * dt + (speed + a_max * dt) ** 2 / (2 * a_max) + 2 * a_max * dt * dt
        order = sorted(range(n), key=lambda i: (-self.along(self.agents[i].pos), self.agents[i].id))
        chosen: list[Optional[tuple[Vec2, float]]] = [None] * n
        for i in order:
            a = self.agents[i]
            v_top = min(a.max_speed, cfg.speed_cap)
            dist = np.hypot(*(nxt - nxt[i]).T)
            near = (dist < reach + reach[i] + cfg.dist_safe + 1.0)
            near[i] = False
            others = tracks[near]
            if len(self._rects):
                rclr = avoidance.rect_clearance(pos[i], self._rects)
                rects = self._rects[rclr <= cfg.detection_range]
            else:
                rects = self._rects
            nxt_i = Vec2(float(nxt[i, 0]), float(nxt[i, 1]))
            pref = avoidance.preferred_command(a, desired[i], a_max, cfg.turn_rate, dt, v_top)
            _, margin = avoidance.pick_safe(nxt_i, [pref], others, rects, cfg.dist_safe, a_max, dt, K)
            if margin >= -1e-9:
                hd, sp = pref
            else:
                cands = avoidance.candidate_commands(a, desired[i], a_max, cfg.turn_rate, dt, v_top)
                k, _ = avoidance.pick_safe(nxt_i, cands, others, rects, cfg.dist_safe, a_max, dt, K)
                hd, sp = cands[k]
            chosen[i] = (hd, sp)
            tracks[i] = kinematics.braking_tracks(
                nxt[i : i + 1], np.array([hd.as_tuple()]), np.array([sp]), a_max, dt, K
            )[0]
        return chosen  # type: ignore[return-value]

    # ------------------------------------------------------------------ tick

    def step(self) -> None:
        cfg = self.cfg
        if not self.surrogate:
            self._update_phase()
        desired = self._desired()
        chosen = self._safe(desired)
        old = self.agents
        speeds = [a.speed for a in old]
        new = []
        for a, (hd, sp) in zip(old, chosen):
            cmd = MotionCommand(hd, sp)
            new.append(kinematics.step(a, cmd, cfg.dt, cfg.a_max, cfg.turn_rate, cfg.speed_cap))
        self.agents = new
        self.tick_count += 1
        self.time = self.tick_count * cfg.dt
        if self.phase is not Phase.DISTURBANCE:
            self._advance_anchor()
        for e in self.events:
            if e.t_done is None:
                self._crossing_check(e, old)
        if not self.surrogate:
            accumulate(self.ledger, speeds, self.power_model, cfg.dt)
            if self.phase is Phase.DISTURBANCE:
                accumulate(self.transit_ledger, speeds, self.power_model, cfg.dt)
            if self.record:
                self._record()
            self._check_finished()

    def _crossing_check(self, e: TransitEvent, old: Optional[list[AgentState]]) -> None:
        line = e.center_line
        prev = {a.id: a for a in old} if old is not None else {}
        for a in self.agents:
            if a.id not in e.members or a.id in e.crossings:
                continue
            y = a.pos.y
            if y >= line:
                if old is None:
                    e.crossings[a.id] = self.time
                else:
                    y0 = prev[a.id].pos.y
                    frac = (line - y0) / (y - y0) if y > y0 else 1.0
                    e.crossings[a.id] = self.time - self.cfg.dt + frac * self.cfg.dt

    def anchor_direction(self) -> Vec2:
        d = self.cfg.goal - self.anchor
        return d.normalized() if d.norm() > 1e-9 else self.cfg.heading

    def _advance_anchor(self) -> None:
        """Glide the formation anchor toward the goal, easing to a stop on it."""
        cfg = self.cfg
        to_goal = (cfg.goal - self.anchor).norm()
        if to_goal <= 1e-9:
            self.anchor_speed = 0.0
            return
        target = min(cfg.nominal_speed, math.sqrt(cfg.a_max * to_goal))
        dv = min(max(target - self.anchor_speed, -0.5 * cfg.a_max * cfg.dt), 0.5 * cfg.a_max * cfg.dt)
        self.anchor_speed = max(self.anchor_speed + dv, 0.0)
        move = min(self.anchor_speed * cfg.dt, to_goal)
        self.anchor = self.anchor + self.anchor_direction() * move

    def _update_phase(self) -> None:
        visible = self._visible()
        seen = set().union(*visible)
        if self.phase in (Phase.FORMATION, Phase.CONVERGENCE):
            if seen:
                self._enter_disturbance(seen)
            elif self.phase is Phase.CONVERGENCE:
                if reformation.is_converged([a.pos for a in self.agents], self.mapping, self.slots(), self.cfg.epsilon):
                    self._set_phase(Phase.FORMATION)
                    self.converged_at = self.time
                    self.agents = [a.with_(phase=Phase.FORMATION) for a in self.agents]
            return
        if not seen:
            self._enter_convergence()
            return
        groups = self._groups()
        for tag in sorted(groups):
            members = groups[tag]
            idx = {a.id: k for k, a in enumerate(self.agents)}
            own = set().union(*(visible[idx[m]] for m in members))
            known = self.planned.get(tag, set())
            if own - known:
                member_agents = [self.agents[idx[m]] for m in members]
                pending = {
                    oid for oid in seen - known
                    if any(not self._passed(a, self._obs_by_id[oid]) for a in member_agents)
                }
                self._plan_group(tag, members, pending)

    def _record(self) -> None:
        row = metrics_tick(self.agents) if len(self.agents) >= 2 else {
            "mean_speed": self.agents[0].speed, "std_speed": 0.0,
            "mean_nn_dist": 0.0, "std_nn_dist": 0.0, "min_pair_dist": math.inf,
        }
        row.update(
            tick=self.tick_count,
            time=self.time,
            min_obstacle_clearance=obstacle_clearance(self.agents, self.obstacles),
            phase=self.phase.value,
        )
        self.metrics.append(row)
        for a in self.agents:
            self.trace.append(
                (self.tick_count, self.time, a.id, a.pos.x, a.pos.y, a.speed, a.phase.value, a.group_id or "")
            )

    def _check_finished(self) -> None:
        if self.phase is Phase.DISTURBANCE:
            return
        radius = self.cfg.formation.inter_agent_distance
        goal = self.goal_slots()
        if all((goal[self.mapping[i]] - a.pos).norm() <= radius for i, a in enumerate(self.agents)):
            self.finished = True

    # ------------------------------------------------------------------- runs

    def run(self, max_time: Optional[float] = None, until_transit: bool = False) -> Simulation:
        limit = self.default_budget() if max_time is None else max_time
        n_max = int(round(limit / self.cfg.dt))
        while not self.finished and self.tick_count < n_max:
            self.step()
            if until_transit and self.events and self.events[0].t_done is not None:
                break
        if not self.finished and not (until_transit and self.events and self.events[0].t_done is not None):
            self.incomplete = True
        return self

    def default_budget(self) -> float:
        cfg = self.cfg
        dist = (cfg.goal - cfg.start).norm()
        return 3.0 * dist / cfg.nominal_speed + 60.0

    def first_transit_time(self) -> Optional[float]:
        roots = [e for e in self.events if e.group == ROOT]
        return roots[0].duration if roots else None


class _Snapshot:
    """Planning view handed to the grouping module."""

    def __init__(self, sim: Simulation, tag: str, members: Sequence[int], oset: ObstacleSet):
        self.sim = sim
        self.tag = tag
        self.members = tuple(sorted(members))
        self.oset = oset

    def unobstructed_transit(self) -> float:
        sim = self.sim
        line = self.oset.center_line
        ys = [a.pos.y for a in sim.agents if a.id in self.members]
        return max(0.0, line - min(ys)) / sim.cfg.nominal_speed

    def surrogate_transit(self, candidate: Candidate, budget: float) -> float:
        sim = self.sim
        twin = sim.fork()
        by_id = {a.id: a for a in twin.agents}
        labels = [r.label for r in self.oset.routes]
        plan = grouping.plan_from_candidate(candidate, by_id, labels, self.tag, sim.cfg.heading)
        event = TransitEvent(0, self.tag, self.members, self.oset.ids, self.oset.center_line, twin.tick_count, twin.time)
        twin._apply_plan(self.tag, plan, self.oset, len(sim.events))
        twin.events = [event]
        twin._crossing_check(event, None)
        n_max = int(math.ceil(budget / sim.cfg.dt))
        for _ in range(n_max):
            if event.t_done is not None:
                break
            twin.step()
        done = event.t_done
        if done is None or done - event.t_detect > budget:
            return math.inf
        return done - event.t_detect


@dataclass
class RunResult:
    sim: Simulation

    @property
    def final_state(self) -> SimulationState:
        return self.sim.state

    @property
    def metrics(self) -> MetricsSeries:
        return self.sim.metrics

    @property
    def ledger(self) -> EnergyLedger:
        return self.sim.ledger

    @property
    def transit_ledger(self) -> EnergyLedger:
        return self.sim.transit_ledger

    @property
    def trace(self) -> list[tuple]:
        return self.sim.trace

    @property
    def incomplete(self) -> bool:
        return self.sim.incomplete


def run(scenario: Scenario, power_model: Optional[PowerModel] = None, max_time: Optional[float] = None, **kw) -> RunResult:
    return RunResult(Simulation(scenario, power_model, Strategy.PROPOSED, **kw).run(max_time))


def run_baseline(scenario: Scenario, power_model: Optional[PowerModel] = None, max_time: Optional[float] = None, **kw) -> RunResult:
    return RunResult(Simulation(scenario, power_model, Strategy.SHORTEST_PATH, **kw).run(max_time))
