"""Power-versus-speed model and per-agent energy bookkeeping."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Sequence

# (speed m/s, power W). Hover is expensive, the power minimum sits at 10 m/s,
# and power climbs at least in proportion to speed above it so cruising at
# 10 m/s is also the cheapest way to cover ground below 20 m/s.
DEFAULT_POWER_SAMPLES: tuple[tuple[float, float], ...] = (
    (0.0, 240.0),
    (2.0, 222.0),
    (4.0, 204.0),
    (6.0, 186.0),
    (8.0, 168.0),
    (10.0, 150.0),
    (12.0, 185.0),
    (14.0, 218.0),
    (16.0, 253.0),
    (18.0, 290.0),
    (20.0, 330.0),
    (22.0, 400.0),
    (25.0, 540.0),
    (30.0, 900.0),
)


@dataclass(frozen=True)
class PowerModel:
    samples: tuple[tuple[float, float], ...] = DEFAULT_POWER_SAMPLES

    def __post_init__(self) -> None:
        s = self.samples
        if len(s) < 3:
            raise ValueError("power model needs at least three samples")
        speeds = [p[0] for p in s]
        powers = [p[1] for p in s]
        if any(b <= a for a, b in zip(speeds, speeds[1:])):
            raise ValueError("power model speeds must be strictly increasing")
        if any(p <= 0 for p in powers):
            raise ValueError("power model powers must be positive")
        k = min(range(len(powers)), key=powers.__getitem__)
        if k in (0, len(powers) - 1):
            raise ValueError("power curve minimum must be interior")
        down = all(b < a for a, b in zip(powers[: k + 1], powers[1 : k + 1]))
        up = all(b > a for a, b in zip(powers[k:], powers[k + 1 :]))
        if not (down and up):
            raise ValueError("power curve must have a single interior minimum")

    @property
    def speeds(self) -> list[float]:
        return [p[0] for p in self.samples]

    @property
    def endurance_speed(self) -> float:
        return min(self.samples, key=lambda p: p[1])[0]


def power_at(model: PowerModel, speed: float) -> float:
    """Piecewise-linear power draw, clamped to the end samples."""
    if speed < 0:
        raise ValueError("speed must be non-negative")
    s = model.samples
    if speed <= s[0][0]:
        return s[0][1]
    if speed >= s[-1][0]:
        return s[-1][1]
    i = bisect.bisect_right(model.speeds, speed)
    (v0, p0), (v1, p1) = s[i - 1], s[i]
    return p0 + (p1 - p0) * (speed - v0) / (v1 - v0)


@dataclass
class EnergyLedger:
    per_agent_energy: list[float]
    t_s: float = 0.0
    t_f: float = 0.0

    @classmethod
    def empty(cls, n_agents: int, t_s: float = 0.0) -> EnergyLedger:
        return cls([0.0] * n_agents, t_s, t_s)

    @property
    def swarm_total(self) -> float:
        return sum(self.per_agent_energy)


def accumulate(ledger: EnergyLedger, speeds: Sequence[float], model: PowerModel, dt: float) -> EnergyLedger:
    """Add P(speed) * dt for each agent; mutates and returns ``ledger``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if len(speeds) != len(ledger.per_agent_energy):
        raise ValueError("one speed per agent required")
    for i, v in enumerate(speeds):
        ledger.per_agent_energy[i] += power_at(model, v) * dt
    ledger.t_f += dt
    return ledger


def compare_runs(a: EnergyLedger | float, b: EnergyLedger | float) -> float:
    """Percent by which ``b`` exceeds ``a``."""
    ea = a.swarm_total if isinstance(a, EnergyLedger) else float(a)
    eb = b.swarm_total if isinstance(b, EnergyLedger) else float(b)
    if ea == 0:
        raise ZeroDivisionError("reference energy is zero")
    return (eb - ea) / ea * 100.0


def energy_per_meter(model: PowerModel, speed: float) -> float:
    if speed <= 0:
        raise ValueError("speed must be positive")
    return power_at(model, speed) / speed


def integrate(model: PowerModel, speeds: Iterable[float], dt: float) -> float:
    return sum(power_at(model, v) for v in speeds) * dt
