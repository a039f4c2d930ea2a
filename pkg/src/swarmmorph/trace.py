"""CSV output for runs, sweeps and comparisons.

Floats are written with six decimals (``%.6f``); every numeric field is finite.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .engine import Simulation
from .experiments import Comparison, SweepRow

POSITIONS_HEADER = ("tick", "time_s", "agent_id", "x", "y", "speed", "phase", "group")
METRICS_HEADER = ("tick", "time_s", "mean_speed", "std_speed", "mean_nn_dist", "std_nn_dist", "min_pair_dist")
ENERGY_HEADER = ("agent_id", "energy_J")
SWEEP_HEADER = ("k_left", "k_right", "time_s")
COMPARE_HEADER = ("strategy", "energy_J", "transit_energy_J", "transit_time_s", "mission_time_s", "complete")
INFEASIBLE_SENTINEL = "-1"


def fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be written")
    return f"{x:.6f}"


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def positions_rows(sim: Simulation):
    for tick, t, aid, x, y, v, phase, group in sim.trace:
        yield (str(tick), fmt(t), str(aid), fmt(x), fmt(y), fmt(v), phase, group)


def metrics_rows(sim: Simulation):
    m = sim.metrics
    for i in range(len(m)):
        yield (
            str(m.tick[i]),
            fmt(m.time[i]),
            fmt(m.mean_speed[i]),
            fmt(m.std_speed[i]),
            fmt(m.mean_nn_dist[i]),
            fmt(m.std_nn_dist[i]),
            fmt(m.min_pair_dist[i]),
        )


def energy_rows(sim: Simulation):
    for i, e in enumerate(sim.ledger.per_agent_energy):
        yield (str(i), fmt(e))
    yield ("total", fmt(sim.ledger.swarm_total))


def emit_trace(
    sim: Simulation,
    out_dir: Union[str, Path],
    positions: str = "positions.csv",
    metrics: str = "metrics.csv",
    energy: str = "energy.csv",
) -> dict[str, Path]:
    out = Path(out_dir)
    paths = {"positions": out / positions, "metrics": out / metrics, "energy": out / energy}
    _write(paths["positions"], POSITIONS_HEADER, positions_rows(sim))
    _write(paths["metrics"], METRICS_HEADER, metrics_rows(sim))
    _write(paths["energy"], ENERGY_HEADER, energy_rows(sim))
    return paths


def emit_sweep(rows: Sequence[SweepRow], path: Union[str, Path]) -> Path:
    p = Path(path)
    _write(
        p,
        SWEEP_HEADER,
        ((str(r.k_left), str(r.k_right), fmt(r.time_s) if r.feasible else INFEASIBLE_SENTINEL) for r in rows),
    )
    return p


def _opt(x: Optional[float]) -> str:
    return INFEASIBLE_SENTINEL if x is None else fmt(x)


def emit_comparison(cmp: Comparison, path: Union[str, Path]) -> Path:
    p = Path(path)
    rows = []
    for label, sim in (("proposed", cmp.proposed), ("shortest_path", cmp.baseline)):
        rows.append(
            (
                label,
                fmt(sim.ledger.swarm_total),
                fmt(sim.transit_ledger.swarm_total),
                _opt(sim.first_transit_time()),
                fmt(sim.time),
                str(int(not sim.incomplete)),
            )
        )
    _write(p, COMPARE_HEADER, rows)
    return p
