"""Command line entry point: ``swarmmorph {run,sweep,compare}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import experiments, scenarios
from .engine import Simulation
from .scenario import ScenarioError, ScenarioFile, dump_scenario, from_builtin, load_scenario
from .trace import emit_comparison, emit_sweep, emit_trace

log = logging.getLogger("swarmmorph")


def _load(args: argparse.Namespace) -> ScenarioFile:
    if args.scenario is not None:
        sf = load_scenario(args.scenario)
    else:
        sf = from_builtin(scenarios.BUILTIN[args.builtin]())
    return sf.with_overrides(dt=args.dt, seed=args.seed)


def _run(sf: ScenarioFile, out: Path) -> int:
    o = sf.experiment.outputs
    sim = Simulation(sf.to_scenario(), sf.power()).run(sf.experiment.time_budget)
    emit_trace(sim, out, o.positions, o.metrics, o.energy)
    dump_scenario(sf, out / o.config)
    phases = " -> ".join(p.value for _, p in sim.phase_log)
    print(f"ticks={sim.tick_count} time_s={sim.time:.1f} phases: {phases}")
    for e in sim.events:
        t = "n/a" if e.duration is None else f"{e.duration:.2f}s"
        print(f"  {e.group}: {e.mode} obstacles={list(e.obstacle_ids)} split={list(e.plan.sizes)} transit={t}")
    print(f"energy_J={sim.ledger.swarm_total:.1f}")
    if sim.incomplete:
        log.warning("time budget expired before the goal was reached; trace is partial")
    return 0


def _sweep(sf: ScenarioFile, out: Path) -> int:
    rows = experiments.sweep_splits(sf.to_scenario())
    emit_sweep(rows, out / "sweep.csv")
    dump_scenario(sf, out / sf.experiment.outputs.config)
    for r in rows:
        t = f"{r.time_s:.2f}" if r.feasible else "infeasible"
        print(f"k_left={r.k_left} k_right={r.k_right} time_s={t}")
    best = experiments.best_row(rows)
    print(f"best split: {best.k_left}/{best.k_right}")
    return 0


def _compare(sf: ScenarioFile, out: Path) -> int:
    o = sf.experiment.outputs
    cmp = experiments.compare_baseline(sf.to_scenario(), sf.power(), sf.experiment.time_budget)
    emit_trace(cmp.proposed, out / "proposed", o.positions, o.metrics, o.energy)
    emit_trace(cmp.baseline, out / "baseline", o.positions, o.metrics, o.energy)
    emit_comparison(cmp, out / "comparison.csv")
    dump_scenario(sf, out / o.config)
    print(f"proposed energy_J={cmp.proposed_energy:.1f} baseline energy_J={cmp.baseline_energy:.1f}")
    print(f"baseline uses {cmp.delta_percent:+.2f}% energy relative to proposed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarmmorph", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("run", "simulate one mission and write the trace"),
        ("sweep", "force every left/right split past a single obstacle"),
        ("compare", "run the proposed planner and the shortest-path baseline"),
    ):
        sp = sub.add_parser(name, help=help_)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--scenario", type=Path, help="scenario JSON file")
        src.add_argument("--builtin", choices=sorted(scenarios.BUILTIN), help="built-in scenario")
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        sp.add_argument("--dt", type=float, default=None, help="override the timestep (s)")
        sp.add_argument("--seed", type=int, default=None, help="recorded in the config echo; dynamics are deterministic")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        sf = _load(args)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    args.out.mkdir(parents=True, exist_ok=True)
    handlers = {"run": _run, "sweep": _sweep, "compare": _compare}
    try:
        return handlers[args.command](sf, args.out)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
