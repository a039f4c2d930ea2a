"""JSON scenario files: schema, validation and conversion to domain objects."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .energy import DEFAULT_POWER_SAMPLES, PowerModel
from .world import FormationSpec, Obstacle, Scenario, SwarmConfig, Vec2, nested_v

Point = tuple[float, float]


class ScenarioError(ValueError):
    """Raised for any unreadable or invalid scenario file."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


class SwarmBlock(_Strict):
    n_agents: int = Field(8, ge=2)
    start: Point = (0.0, 0.0)
    goal: Point = (0.0, 200.0)
    detection_range: float = Field(30.0, gt=0)
    dist_safe: float = Field(2.0, gt=0)
    g: float = Field(9.81, gt=0)
    c_d: float = Field(0.3, gt=0)
    t_c: float = Field(0.0, ge=0)
    dt: float = Field(0.1, gt=0)
    nominal_speed: float = Field(10.0, gt=0)
    speed_margin: float = Field(2.0, ge=0)
    speed_cap: float = Field(20.0, gt=0)
    a_max: float = Field(2.0, gt=0)
    turn_rate_deg: float = Field(90.0, gt=0)
    danger_margin: Optional[float] = Field(None, ge=0)
    route_margin: float = Field(1.0, ge=0)
    epsilon: float = Field(0.5, gt=0)
    lookahead: Optional[float] = Field(None, ge=0)
    formation_gain: float = Field(0.5, gt=0)

    @model_validator(mode="after")
    def _cross(self) -> SwarmBlock:
        if self.detection_range <= self.dist_safe:
            raise ValueError("detection_range must exceed dist_safe")
        if self.speed_margin >= self.nominal_speed:
            raise ValueError("speed_margin must be below nominal_speed")
        return self


class FormationBlock(_Strict):
    shape: Literal["nested_v", "custom"] = "nested_v"
    spacing: float = Field(6.0, gt=0)
    slots: Optional[list[Point]] = None

    @model_validator(mode="after")
    def _slots(self) -> FormationBlock:
        if self.shape == "custom" and not self.slots:
            raise ValueError("custom formation needs slots")
        if self.shape == "nested_v" and self.slots is not None:
            raise ValueError("slots are only allowed with shape 'custom'")
        return self


class ObstacleBlock(_Strict):
    id: int
    center: Point
    half_width: float = Field(gt=0)
    half_depth: float = Field(gt=0)


class PowerBlock(_Strict):
    samples: list[Point] = Field(default_factory=lambda: [tuple(p) for p in DEFAULT_POWER_SAMPLES])

    @field_validator("samples")
    @classmethod
    def _valid(cls, v: list[Point]) -> list[Point]:
        PowerModel(tuple(tuple(p) for p in v))
        return v


class OutputBlock(_Strict):
    positions: str = "positions.csv"
    metrics: str = "metrics.csv"
    energy: str = "energy.csv"
    config: str = "config.json"


class ExperimentBlock(_Strict):
    mode: Literal["single", "sweep-splits", "compare-baseline"] = "single"
    time_budget: Optional[float] = Field(None, gt=0)
    outputs: OutputBlock = Field(default_factory=OutputBlock)
    seed: int = 0


class ScenarioFile(_Strict):
    name: str = "scenario"
    swarm: SwarmBlock = Field(default_factory=SwarmBlock)
    formation: FormationBlock = Field(default_factory=FormationBlock)
    obstacles: list[ObstacleBlock] = Field(default_factory=list)
    power_model: PowerBlock = Field(default_factory=PowerBlock)
    experiment: ExperimentBlock = Field(default_factory=ExperimentBlock)

    @model_validator(mode="after")
    def _consistent(self) -> ScenarioFile:
        ids = [o.id for o in self.obstacles]
        if len(set(ids)) != len(ids):
            raise ValueError("obstacle ids must be unique")
        if self.formation.shape == "custom" and len(self.formation.slots or []) != self.swarm.n_agents:
            raise ValueError("formation.slots must have one entry per agent")
        self.formation_spec()  # slot spacing check
        return self

    def formation_spec(self) -> FormationSpec:
        f = self.formation
        if f.shape == "nested_v":
            return nested_v(self.swarm.n_agents, f.spacing)
        return FormationSpec(tuple(Vec2(*p) for p in f.slots or ()), inter_agent_distance=f.spacing)

    def swarm_config(self) -> SwarmConfig:
        s = self.swarm
        return SwarmConfig(
            n_agents=s.n_agents,
            formation=self.formation_spec(),
            goal=Vec2(*s.goal),
            start=Vec2(*s.start),
            detection_range=s.detection_range,
            dist_safe=s.dist_safe,
            g=s.g,
            c_d=s.c_d,
            t_c=s.t_c,
            dt=s.dt,
            nominal_speed=s.nominal_speed,
            speed_margin=s.speed_margin,
            speed_cap=s.speed_cap,
            a_max=s.a_max,
            turn_rate=math.radians(s.turn_rate_deg),
            danger_margin=s.danger_margin,
            route_margin=s.route_margin,
            epsilon=s.epsilon,
            lookahead=s.lookahead,
            formation_gain=s.formation_gain,
        )

    def to_scenario(self) -> Scenario:
        obs = tuple(Obstacle(o.id, Vec2(*o.center), o.half_width, o.half_depth) for o in self.obstacles)
        return Scenario(self.swarm_config(), obs, self.name)

    def power(self) -> PowerModel:
        return PowerModel(tuple(tuple(p) for p in self.power_model.samples))

    def with_overrides(self, dt: Optional[float] = None, seed: Optional[int] = None) -> ScenarioFile:
        data = self.model_dump()
        if dt is not None:
            data["swarm"]["dt"] = dt
        if seed is not None:
            data["experiment"]["seed"] = seed
        return parse_scenario(data)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def _describe(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def parse_scenario(data: Union[dict, str]) -> ScenarioFile:
    try:
        if isinstance(data, str):
            return ScenarioFile.model_validate_json(data)
        return ScenarioFile.model_validate(data)
    except ValidationError as e:
        raise ScenarioError(_describe(e)) from None


def load_scenario(path: Union[str, Path]) -> ScenarioFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read {p}: {e.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{p}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_scenario(raw)


def dump_scenario(sf: ScenarioFile, path: Union[str, Path]) -> None:
    Path(path).write_text(sf.to_json(), encoding="utf-8")


def from_builtin(scenario: Scenario, power: Optional[PowerModel] = None, mode: str = "single") -> ScenarioFile:
    """Scenario file equivalent of an in-memory nested-V scenario."""
    cfg = scenario.cfg
    data = {
        "name": scenario.name,
        "swarm": {
            "n_agents": cfg.n_agents,
            "start": cfg.start.as_tuple(),
            "goal": cfg.goal.as_tuple(),
            "detection_range": cfg.detection_range,
            "dist_safe": cfg.dist_safe,
            "g": cfg.g,
            "c_d": cfg.c_d,
            "t_c": cfg.t_c,
            "dt": cfg.dt,
            "nominal_speed": cfg.nominal_speed,
            "speed_margin": cfg.speed_margin,
            "speed_cap": cfg.speed_cap,
            "a_max": cfg.a_max,
            "turn_rate_deg": math.degrees(cfg.turn_rate),
            "danger_margin": cfg.danger_margin,
            "route_margin": cfg.route_margin,
            "epsilon": cfg.epsilon,
            "lookahead": cfg.lookahead,
            "formation_gain": cfg.formation_gain,
        },
        "formation": {"shape": "nested_v", "spacing": cfg.formation.inter_agent_distance},
        "obstacles": [
            {"id": o.id, "center": o.center.as_tuple(), "half_width": o.half_width, "half_depth": o.half_depth}
            for o in scenario.obstacles
        ],
        "experiment": {"mode": mode},
    }
    if power is not None:
        data["power_model"] = {"samples": [list(p) for p in power.samples]}
    return parse_scenario(data)
