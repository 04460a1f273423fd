"""Experiment runner: random deployments, planner dispatch, metrics and CSV output."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .engine import simulate
from .lrdc import round_lrdc, solve_lrdc_lp
from .model import (
    Area,
    Charger,
    Node,
    PhysicsParams,
    RadiusAssignment,
    Scenario,
    ScenarioError,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from .planners import PlannerConfig, charging_oriented, exhaustive_search, iterative_lrec
from .radiation import get_kernel, max_radiation, within_cap

log = logging.getLogger(__name__)

PLANNER_NAMES = ("iterative-lrec", "charging-oriented", "ip-lrdc", "exhaustive")
METRICS = ("objective", "completion_time", "max_radiation")

DEFAULT_AREA = Area(0.0, 0.0, 10.0, 10.0)
# alpha = 1 although the reported setup lists 0, which would disable charging
DEFAULT_PARAMS = PhysicsParams(alpha=1.0, beta=1.0, gamma=0.1, rho=0.2)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 100
    m: int = 10
    area: Area = DEFAULT_AREA
    params: PhysicsParams = DEFAULT_PARAMS
    trials: int = 100
    planner: str = "iterative-lrec"
    planner_config: PlannerConfig = PlannerConfig()
    seed: int = 0
    out_dir: str | None = None
    energy: float = 1.0
    capacity: float = 1.0
    # fixed instance reused by every trial instead of random deployments
    scenario: Scenario | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.planner not in PLANNER_NAMES:
            raise ValueError(f"unknown planner {self.planner!r}; choose from {PLANNER_NAMES}")
        if self.n < 0 or self.m < 0:
            raise ValueError("n and m must be non-negative")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        data = dict(data)
        kwargs: dict[str, Any] = {}
        for key in ("n", "m", "trials", "seed"):
            if key in data:
                kwargs[key] = int(data.pop(key))
        for key in ("energy", "capacity"):
            if key in data:
                kwargs[key] = float(data.pop(key))
        if "planner" in data:
            kwargs["planner"] = str(data.pop("planner"))
        if "out_dir" in data:
            kwargs["out_dir"] = data.pop("out_dir")
        if "area" in data:
            kwargs["area"] = Area(**{k: float(v) for k, v in data.pop("area").items()})
        if "params" in data:
            kwargs["params"] = PhysicsParams(**{k: float(v) for k, v in data.pop("params").items()})
        if "planner_config" in data:
            kwargs["planner_config"] = PlannerConfig(**data.pop("planner_config"))
        if "scenario" in data:
            source = data.pop("scenario")
            if isinstance(source, (str, Path)):
                with open(source) as fh:
                    source = json.load(fh)
            kwargs["scenario"] = scenario_from_dict(source)
        if data:
            raise ValueError(f"unknown config keys: {sorted(data)}")
        return cls(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def generate_scenario(
    n: int,
    m: int,
    area: Area = DEFAULT_AREA,
    params: PhysicsParams = DEFAULT_PARAMS,
    seed: int = 0,
    energy: float = 1.0,
    capacity: float = 1.0,
) -> Scenario:
    """Chargers and nodes placed i.i.d. uniformly in ``area``, identical supplies."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    rng = np.random.default_rng(seed)
    lo = np.array([area.x_min, area.y_min])
    span = np.array([area.width, area.height])
    cxy = lo + rng.random((m, 2)) * span
    nxy = lo + rng.random((n, 2)) * span
    chargers = tuple(Charger(i, (float(x), float(y)), energy) for i, (x, y) in enumerate(cxy))
    nodes = tuple(Node(i, (float(x), float(y)), capacity) for i, (x, y) in enumerate(nxy))
    return Scenario(chargers, nodes, params, area)


@dataclass(frozen=True)
class PlanOutcome:
    radii: RadiusAssignment
    # model-level value of the disjoint relaxation; only for ip-lrdc
    proxy_objective: float | None = None
    trace: tuple[float, ...] = ()


def _plan_iterative(scenario: Scenario, config: PlannerConfig) -> PlanOutcome:
    plan = iterative_lrec(scenario, config)
    return PlanOutcome(plan.radii, None, plan.trace)


def _plan_charging_oriented(scenario: Scenario, config: PlannerConfig) -> PlanOutcome:
    return PlanOutcome(charging_oriented(scenario))


def _plan_ip_lrdc(scenario: Scenario, config: PlannerConfig) -> PlanOutcome:
    rounded = round_lrdc(scenario, solve_lrdc_lp(scenario))
    return PlanOutcome(rounded.radii, rounded.objective)


def _plan_exhaustive(scenario: Scenario, config: PlannerConfig) -> PlanOutcome:
    return PlanOutcome(exhaustive_search(scenario, config).radii)


PLANNERS: dict[str, Callable[[Scenario, PlannerConfig], PlanOutcome]] = {
    "iterative-lrec": _plan_iterative,
    "charging-oriented": _plan_charging_oriented,
    "ip-lrdc": _plan_ip_lrdc,
    "exhaustive": _plan_exhaustive,
}


def plan(name: str, scenario: Scenario, config: PlannerConfig = PlannerConfig()) -> PlanOutcome:
    try:
        planner = PLANNERS[name]
    except KeyError:
        raise ValueError(f"unknown planner {name!r}; choose from {PLANNER_NAMES}") from None
    return planner(scenario, config)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    objective: float
    completion_time: float
    max_radiation: float
    rho: float
    balance: tuple[float, ...]
    curve: tuple[tuple[float, float], ...]
    radii: tuple[float, ...]
    proxy_objective: float | None = None

    @property
    def within_cap(self) -> bool:
        return within_cap(self.max_radiation, self.rho)


@dataclass
class MetricsRecord:
    planner: str
    trials: list[TrialRecord] = field(default_factory=list)
    failures: list[tuple[int, str]] = field(default_factory=list)

    def values(self, metric: str) -> np.ndarray:
        return np.array([getattr(t, metric) for t in self.trials], dtype=float)

    def aggregates(self) -> dict[str, dict[str, float] | None]:
        out: dict[str, dict[str, float] | None] = {}
        for metric in METRICS:
            vals = self.values(metric)
            if vals.size == 0:
                out[metric] = None
                continue
            q1, med, q3 = np.percentile(vals, [25, 50, 75])
            out[metric] = {
                "mean": float(vals.mean()),
                "median": float(med),
                "q1": float(q1),
                "q3": float(q3),
                "min": float(vals.min()),
                "max": float(vals.max()),
            }
        return out

    def summary(self) -> dict[str, Any]:
        proxies = [t.proxy_objective for t in self.trials if t.proxy_objective is not None]
        return {
            "planner": self.planner,
            "trials": len(self.trials),
            "failures": [{"trial": i, "error": msg} for i, msg in self.failures],
            "aggregates": self.aggregates(),
            "radiation_violations": sum(not t.within_cap for t in self.trials),
            "proxy_objective_mean": float(np.mean(proxies)) if proxies else None,
        }


def run_trial(trial: int, scenario: Scenario, planner: str, config: PlannerConfig, seed: int) -> TrialRecord:
    cfg = replace(config, seed=seed)
    outcome = plan(planner, scenario, cfg)
    result = simulate(scenario, outcome.radii)
    rad = max_radiation(scenario, outcome.radii, None, cfg.K, seed, get_kernel(cfg.kernel))
    curve = tuple((s.time, result.transferred_at(s)) for s in result.state_snapshots)
    return TrialRecord(
        trial=trial,
        seed=seed,
        objective=result.objective,
        completion_time=result.completion_time,
        max_radiation=rad.max_value,
        rho=scenario.params.rho,
        balance=tuple(float(x) for x in np.sort(result.delivered)),
        curve=curve,
        radii=outcome.radii.radii,
        proxy_objective=outcome.proxy_objective,
    )


def run_experiment(config: ExperimentConfig) -> MetricsRecord:
    """Run every trial of ``config``; failed trials are logged and listed, not dropped."""
    record = MetricsRecord(config.planner)
    for trial in range(config.trials):
        seed = config.seed + trial
        try:
            if config.scenario is not None:
                scenario = config.scenario
            else:
                scenario = generate_scenario(
                    config.n, config.m, config.area, config.params, seed, config.energy, config.capacity
                )
            problems = validate_scenario(scenario)
            if problems:
                raise ScenarioError(problems)
            record.trials.append(run_trial(trial, scenario, config.planner, config.planner_config, seed))
        except Exception as exc:  # record and keep going; surfaced via exit code
            log.error("trial %d failed: %s", trial, exc)
            record.failures.append((trial, f"{type(exc).__name__}: {exc}"))
    if config.out_dir is not None:
        emit_metrics(record, config.out_dir)
    return record


def emit_metrics(record: MetricsRecord, out_dir: str | Path) -> dict[str, Path]:
    """Write efficiency/radiation/balance CSVs, a per-trial table and ``summary.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "efficiency": out / "efficiency.csv",
        "radiation": out / "radiation.csv",
        "balance": out / "balance.csv",
        "trials": out / "trials.csv",
        "summary": out / "summary.json",
    }
    with open(paths["efficiency"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "time", "cumulative_energy"])
        for t in record.trials:
            for time, energy in t.curve:
                w.writerow([t.trial, repr(time), repr(energy)])
    with open(paths["radiation"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "max_radiation", "rho"])
        for t in record.trials:
            w.writerow([t.trial, repr(t.max_radiation), repr(t.rho)])
    with open(paths["balance"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "node_rank", "final_energy"])
        for t in record.trials:
            for rank, energy in enumerate(t.balance, start=1):
                w.writerow([t.trial, rank, repr(energy)])
    with open(paths["trials"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "seed", "objective", "completion_time", "max_radiation", "proxy_objective"])
        for t in record.trials:
            proxy = "" if t.proxy_objective is None else repr(t.proxy_objective)
            w.writerow([t.trial, t.seed, repr(t.objective), repr(t.completion_time), repr(t.max_radiation), proxy])
    paths["summary"].write_text(json.dumps(record.summary(), indent=2, sort_keys=True) + "\n")
    return paths


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    data = {
        "n": config.n,
        "m": config.m,
        "area": asdict(config.area),
        "params": asdict(config.params),
        "trials": config.trials,
        "planner": config.planner,
        "planner_config": asdict(config.planner_config),
        "seed": config.seed,
        "energy": config.energy,
        "capacity": config.capacity,
    }
    if config.out_dir is not None:
        data["out_dir"] = config.out_dir
    if config.scenario is not None:
        data["scenario"] = scenario_to_dict(config.scenario)
    return data
