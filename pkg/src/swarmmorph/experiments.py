"""Batch experiments: forced split sweeps and proposed-versus-baseline comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .energy import PowerModel, compare_runs
from .engine import Simulation, Strategy
from .world import Scenario

INFEASIBLE = math.inf


@dataclass(frozen=True)
class SweepRow:
    k_left: int
    k_right: int
    time_s: float

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.time_s)


def transit_for_split(scenario: Scenario, k_left: int, budget_factor: float = 10.0) -> float:
    """Transit time of the first obstacle with ``k_left`` agents forced onto the left route."""
    n = scenario.cfg.n_agents
    sim = Simulation(scenario, strategy=Strategy.PROPOSED, forced_split=(k_left, n - k_left), record=False)
    first = None
    limit = sim.default_budget()
    while sim.tick_count * sim.cfg.dt < limit:
        sim.step()
        if sim.events:
            first = sim.events[0]
            break
    if first is None:
        raise ValueError("no obstacle was detected; sweep needs a single-obstacle scenario")
    if len(first.plan.sizes) != 2:
        raise ValueError("sweep needs a single-obstacle scenario")
    budget = budget_factor * max((first.center_line - min(a.pos.y for a in sim.agents)) / sim.cfg.nominal_speed, 1.0)
    while first.t_done is None and sim.time - first.t_detect <= budget:
        sim.step()
    t = first.duration
    return INFEASIBLE if t is None or t > budget else t


def sweep_splits(scenario: Scenario) -> list[SweepRow]:
    if len(scenario.obstacles) != 1:
        raise ValueError("sweep needs exactly one obstacle")
    n = scenario.cfg.n_agents
    return [SweepRow(k, n - k, transit_for_split(scenario, k)) for k in range(n + 1)]


def best_row(rows: list[SweepRow]) -> SweepRow:
    """Fastest row; ties go to the more balanced split, then the smaller k_left."""
    feasible = [r for r in rows if r.feasible]
    if not feasible:
        raise ValueError("every split is infeasible")
    return min(feasible, key=lambda r: (r.time_s, abs(r.k_left - r.k_right), r.k_left))


@dataclass(frozen=True)
class Comparison:
    proposed: Simulation
    baseline: Simulation

    @property
    def proposed_energy(self) -> float:
        return self.proposed.ledger.swarm_total

    @property
    def baseline_energy(self) -> float:
        return self.baseline.ledger.swarm_total

    @property
    def delta_percent(self) -> float:
        return compare_runs(self.proposed.ledger, self.baseline.ledger)

    @property
    def proposed_transit(self) -> Optional[float]:
        return self.proposed.first_transit_time()

    @property
    def baseline_transit(self) -> Optional[float]:
        return self.baseline.first_transit_time()


def compare_baseline(
    scenario: Scenario, power_model: Optional[PowerModel] = None, max_time: Optional[float] = None, record: bool = True
) -> Comparison:
    a = Simulation(scenario, power_model, Strategy.PROPOSED, record=record).run(max_time)
    b = Simulation(scenario, power_model, Strategy.SHORTEST_PATH, record=record).run(max_time)
    return Comparison(a, b)
