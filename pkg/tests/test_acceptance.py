"""Acceptance criteria, one test per criterion.

Run with pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly: ``python tests/test_acceptance.py``.
"""

import filecmp
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from swarmmorph import cli, experiments, grouping, reformation, scenarios, sensing  # noqa: E402
from swarmmorph.energy import EnergyLedger, PowerModel, accumulate, compare_runs, power_at  # noqa: E402
from swarmmorph.engine import Simulation, Strategy  # noqa: E402
from swarmmorph.world import Obstacle, Scenario, SwarmConfig, Vec2, initial_agents, nested_v  # noqa: E402

N_RANDOM_SCENARIOS = 50
N_ASSIGNMENTS = 120


# ------------------------------------------------------------------ helpers


def forced_trace(scenario, k_left):
    """Trace of a run with the first split forced, from tick 0 until the transit is over."""
    n = scenario.cfg.n_agents
    sim = Simulation(scenario, forced_split=(k_left, n - k_left))
    trace = [
        (0, 0.0, a.id, a.pos.x, a.pos.y, a.speed, a.phase.value, "")
        for a in initial_agents(scenario.cfg)
    ]
    limit = sim.default_budget()
    while sim.time < limit:
        sim.step()
        if sim.events and sim.events[0].t_done is not None:
            break
    return trace + sim.trace


def chosen_split(scenario):
    sim = Simulation(scenario, record=False)
    while not sim.events and sim.time < sim.default_budget():
        sim.step()
    return sim.events[0].plan.sizes


def random_single_obstacle(rng):
    n = int(rng.integers(2, 9))
    cfg = SwarmConfig(n_agents=n, formation=nested_v(n, 6.0), goal=Vec2(0.0, 200.0))
    obs = Obstacle(
        0,
        Vec2(round(float(rng.uniform(-10, 10)), 2), round(float(rng.uniform(45, 80)), 2)),
        round(float(rng.uniform(4, 12)), 2),
        round(float(rng.uniform(2, 5)), 2),
    )
    return Scenario(cfg, (obs,), "random")


def final_slot_error(sim):
    return max(reformation.formation_errors([a.pos for a in sim.agents], sim.mapping, sim.slots()))


# ----------------------------------------------------------------- criteria


def criterion_1_split_sweep_shape():
    dt = scenarios.centered().cfg.dt
    t0 = time.perf_counter()
    centre = [r.time_s for r in experiments.sweep_splits(scenarios.centered())]
    elapsed = time.perf_counter() - t0
    k_min = int(np.argmin(centre))
    assert k_min == 4, f"centered minimum at k={k_min}: {centre}"
    for k in range(k_min):
        assert centre[k] >= centre[k + 1] - dt, f"not non-increasing before the minimum: {centre}"
    for k in range(k_min, len(centre) - 1):
        assert centre[k + 1] >= centre[k] - dt, f"not non-decreasing after the minimum: {centre}"

    shifted = experiments.sweep_splits(scenarios.left_shifted())
    best = experiments.best_row(shifted)
    assert best.k_left > best.k_right, f"left-shifted optimum {best.k_left}/{best.k_right}"

    mirrored = experiments.sweep_splits(scenarios.left_shifted().mirrored())
    mbest = experiments.best_row(mirrored)
    assert (mbest.k_left, mbest.k_right) == (best.k_right, best.k_left)
    rev = [r.time_s for r in reversed(mirrored)]
    for a, b in zip((r.time_s for r in shifted), rev):
        assert abs(a - b) <= dt, "mirrored sweep is not the reversed sweep"
    assert elapsed < 30.0, f"centered sweep took {elapsed:.1f} s"
    return f"centered min k=4; left-shifted {best.k_left}/{best.k_right}; mirrored {mbest.k_left}/{mbest.k_right}"


def criterion_2_energy_advantage():
    t0 = time.perf_counter()
    cmp = experiments.compare_baseline(scenarios.left_shifted(), PowerModel())
    elapsed = time.perf_counter() - t0
    delta = cmp.delta_percent
    detail = (
        f"proposed {cmp.proposed_energy / 1000:.3f} kJ, baseline {cmp.baseline_energy / 1000:.3f} kJ, "
        f"delta {delta:+.2f}% (published reference: +14.7%)"
    )
    print(detail)
    assert cmp.baseline_energy > cmp.proposed_energy, detail
    assert elapsed < 10.0, f"comparison took {elapsed:.1f} s"
    return detail


def criterion_3_grouping_matches_oracle():
    rng = np.random.default_rng(20240611)
    mismatches = []
    for i in range(N_RANDOM_SCENARIOS):
        sc = random_single_obstacle(rng)
        n = sc.cfg.n_agents
        k_oracle, times = oracles.split_oracle(sc, forced_trace)
        got = chosen_split(sc)
        if got != (k_oracle, n - k_oracle):
            mismatches.append((i, n, sc.obstacles[0], got, k_oracle, times))
    assert not mismatches, f"{len(mismatches)} mismatches, first: {mismatches[0]}"
    return f"{N_RANDOM_SCENARIOS} scenarios, all match"


def criterion_4_assignment_optimality():
    rng = np.random.default_rng(7)
    for _ in range(N_ASSIGNMENTS):
        n = int(rng.integers(1, 9))
        src = rng.uniform(-50, 50, (n, 2))
        dst = rng.uniform(-50, 50, (n, 2))
        problem = reformation.AssignmentProblem(
            tuple(Vec2(*p) for p in src), tuple(Vec2(*p) for p in dst)
        )
        got = reformation.solve_assignment(problem)
        best, _ = oracles.brute_force_assignment(oracles.squared_costs(src, dst))
        assert abs(got.total_cost - best) <= 1e-9 * max(1.0, best), (got, best)
    return f"{N_ASSIGNMENTS} instances, n <= 8"


def criterion_5_safety(runs):
    cases = ["open", "centered", "left-shifted", "left-shifted-mirrored", "forest"]
    worst_pair, worst_obs = math.inf, math.inf
    for name in cases:
        for strategy in Strategy:
            sim = runs(name, strategy)
            ds = sim.cfg.dist_safe
            pair = min(sim.metrics.min_pair_dist)
            clr = min(sim.metrics.min_obstacle_clearance)
            assert pair >= ds - 1e-9, f"{name}/{strategy.value}: min pair distance {pair}"
            assert clr >= 0.0, f"{name}/{strategy.value}: agent inside an obstacle"
            assert clr >= ds - 1e-9, f"{name}/{strategy.value}: obstacle clearance {clr}"
            worst_pair, worst_obs = min(worst_pair, pair), min(worst_obs, clr)
    return f"min pair {worst_pair:.3f} m, min obstacle clearance {worst_obs:.3f} m"


def criterion_6_reformation_residual():
    sim = Simulation(scenarios.forest())
    at_converge = None
    while not sim.finished and sim.time < sim.default_budget():
        before = sim.phase.value
        sim.step()
        if before == "Convergence" and sim.phase.value == "Formation":
            at_converge = (final_slot_error(sim), sim.metrics.mean_nn_dist[-1])
    nested = any(len(e.group) >= 3 for e in sim.events)
    spacing = sim.cfg.formation.inter_agent_distance
    eps = sim.cfg.epsilon
    assert nested, "forest run did not produce nested subgroups"
    assert at_converge is not None, "formation was never restored"
    err, nn = at_converge
    assert err <= eps, f"slot error {err:.3f} at convergence"
    assert abs(nn - spacing) <= 0.1 * spacing, f"mean nn distance {nn:.3f}"
    end_err = final_slot_error(sim)
    end_nn = sim.metrics.mean_nn_dist[-1]
    assert end_err <= eps and abs(end_nn - spacing) <= 0.1 * spacing
    return f"slot error {err:.3f} m at convergence, {end_err:.3f} m at goal; mean nn {end_nn:.3f} m"


def criterion_7_equation_values():
    # time to impact
    assert sensing.time_to_impact(50.0, 10.0) == 5.0
    assert sensing.time_to_impact(0.0, 10.0) == 0.0
    assert sensing.time_to_impact(10.0, 0.0) == math.inf
    # stopping, braking and reaction distance
    d = sensing.stopping_distance(10.0, 9.81, 0.3, 0.0)
    assert d.d_r == 0.0 and d.d_b == 10.0**2 / (2 * 9.81 * 0.3) and d.d_s == d.d_b
    assert abs(d.d_s - 16.99) < 0.005
    assert sensing.stopping_distance(0.0) == (0.0, 0.0, 0.0)
    d2 = sensing.stopping_distance(10.0, 9.81, 0.3, 0.5)
    assert d2.d_r == 5.0 and d2.d_s == 5.0 + d.d_b
    assert sensing.danger_zone(17.0, 3.0) == 20.0
    assert sensing.danger_zone(17.0, 0.0) == 17.0
    # population factor
    assert [grouping.population_factor(k) for k in (0, 1, 3)] == [1, 2, 4]
    # energy sum
    flat = PowerModel(((0.0, 250.0), (10.0, 200.0), (20.0, 400.0)))
    assert power_at(flat, 10.0) == 200.0
    ledger = EnergyLedger.empty(1)
    for _ in range(100):
        accumulate(ledger, [10.0], flat, 0.1)
    assert abs(ledger.swarm_total - 2000.0) < 1e-9
    assert abs(compare_runs(54111.0, 62084.0) - 14.73) < 0.01
    # correspondence energy at lambda = 0 against the permutation oracle
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(1, 8))
        src = [Vec2(*p) for p in rng.uniform(-20, 20, (n, 2))]
        dst = [Vec2(*p) for p in rng.uniform(-20, 20, (n, 2))]
        m = reformation.solve_assignment(reformation.AssignmentProblem(tuple(src), tuple(dst))).mapping
        best, _ = oracles.brute_force_assignment(oracles.squared_costs([p.as_tuple() for p in src], [p.as_tuple() for p in dst]))
        assert abs(reformation.tps_energy(m, src, dst) - best) <= 1e-9 * max(1.0, best)
    return "time to impact, stopping distance, danger zone, population factor, energy sum, TPS at lambda=0"


def criterion_8_determinism():
    jobs = [
        ["run", "--builtin", "centered"],
        ["run", "--builtin", "forest"],
        ["sweep", "--builtin", "left-shifted"],
        ["compare", "--builtin", "left-shifted"],
    ]
    checked = 0
    with tempfile.TemporaryDirectory() as tmp:
        for job in jobs:
            outs = []
            for rep in range(2):
                out = Path(tmp) / f"{job[0]}-{job[2]}-{rep}"
                assert cli.main(job + ["--out", str(out)]) == 0
                outs.append(out)
            files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
            assert files
            for rel in files:
                assert filecmp.cmp(outs[0] / rel, outs[1] / rel, shallow=False), f"{job}: {rel} differs"
                checked += 1
    return f"{checked} files byte-identical across reruns"


# -------------------------------------------------------------- pytest glue


def test_criterion_1_split_sweep_shape(record_property):
    record_property("detail", criterion_1_split_sweep_shape())


def test_criterion_2_energy_advantage(record_property):
    record_property("detail", criterion_2_energy_advantage())


def test_criterion_3_grouping_matches_oracle(record_property):
    record_property("detail", criterion_3_grouping_matches_oracle())


def test_criterion_4_assignment_optimality(record_property):
    record_property("detail", criterion_4_assignment_optimality())


def test_criterion_5_safety(record_property, runs):
    record_property("detail", criterion_5_safety(runs))


def test_criterion_6_reformation_residual(record_property):
    record_property("detail", criterion_6_reformation_residual())


def test_criterion_7_equation_values(record_property):
    record_property("detail", criterion_7_equation_values())


def test_criterion_8_determinism(record_property):
    record_property("detail", criterion_8_determinism())


if __name__ == "__main__":
    import logging

    logging.disable(logging.WARNING)
    cache = {}

    def _runs(name, strategy=Strategy.PROPOSED):
        key = (name, Strategy(strategy))
        if key not in cache:
            sc = scenarios.left_shifted().mirrored() if name == "left-shifted-mirrored" else scenarios.BUILTIN[name]()
            cache[key] = Simulation(sc, strategy=key[1]).run()
        return cache[key]

    checks = [
        criterion_1_split_sweep_shape,
        criterion_2_energy_advantage,
        criterion_3_grouping_matches_oracle,
        criterion_4_assignment_optimality,
        lambda: criterion_5_safety(_runs),
        criterion_6_reformation_residual,
        criterion_7_equation_values,
        criterion_8_determinism,
    ]
    failed = 0
    for i, fn in enumerate(checks, 1):
        try:
            detail = fn()
            print(f"PASS criterion {i}: {detail}")
        except AssertionError as e:
            failed += 1
            print(f"FAIL criterion {i}: {e}")
    sys.exit(1 if failed else 0)
