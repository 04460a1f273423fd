"""Problem instances, physics parameters and the pointwise charging-rate law."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np


class ScenarioError(ValueError):
    """Raised when a scenario (or a file describing one) is invalid."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class PhysicsParams:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    rho: float = 2.0

    @property
    def solo_radius_cap(self) -> float:
        """Largest radius a lone charger may use without exceeding ``rho``.

        A single source peaks at its own centre with ``gamma*alpha*r**2/beta**2``.
        """
        if self.rho <= 0:
            return 0.0
        return self.beta * math.sqrt(self.rho / (self.gamma * self.alpha))


@dataclass(frozen=True)
class Area:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, point: Sequence[float]) -> bool:
        x, y = point
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def corners(self) -> np.ndarray:
        return np.array(
            [
                [self.x_min, self.y_min],
                [self.x_max, self.y_min],
                [self.x_min, self.y_max],
                [self.x_max, self.y_max],
            ]
        )

    def farthest_distance(self, point: Sequence[float]) -> float:
        """Maximum distance from ``point`` to any point of the rectangle."""
        d = np.hypot(*(self.corners() - np.asarray(point, dtype=float)).T)
        return float(d.max())


@dataclass(frozen=True)
class Charger:
    id: int
    position: tuple[float, float]
    initial_energy: float


@dataclass(frozen=True)
class Node:
    id: int
    position: tuple[float, float]
    initial_capacity: float


@dataclass(frozen=True)
class Scenario:
    chargers: tuple[Charger, ...]
    nodes: tuple[Node, ...]
    params: PhysicsParams
    area: Area
    # cached arrays; derived from the fields above
    _charger_xy: np.ndarray = field(init=False, repr=False, compare=False)
    _node_xy: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "chargers", tuple(self.chargers))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        cxy = np.array([c.position for c in self.chargers], dtype=float).reshape(-1, 2)
        nxy = np.array([v.position for v in self.nodes], dtype=float).reshape(-1, 2)
        cxy.flags.writeable = False
        nxy.flags.writeable = False
        object.__setattr__(self, "_charger_xy", cxy)
        object.__setattr__(self, "_node_xy", nxy)

    @property
    def m(self) -> int:
        return len(self.chargers)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def charger_positions(self) -> np.ndarray:
        return self._charger_xy

    @property
    def node_positions(self) -> np.ndarray:
        return self._node_xy

    @property
    def initial_energy(self) -> np.ndarray:
        return np.array([c.initial_energy for c in self.chargers], dtype=float)

    @property
    def initial_capacity(self) -> np.ndarray:
        return np.array([v.initial_capacity for v in self.nodes], dtype=float)

    def distances(self) -> np.ndarray:
        """Charger-by-node Euclidean distance matrix, shape ``(m, n)``."""
        diff = self._charger_xy[:, None, :] - self._node_xy[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    def with_params(self, **changes: float) -> "Scenario":
        return Scenario(self.chargers, self.nodes, replace(self.params, **changes), self.area)


@dataclass(frozen=True)
class RadiusAssignment:
    radii: tuple[float, ...]

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        for r in radii:
            if not math.isfinite(r) or r < 0:
                raise ValueError(f"radius must be finite and non-negative, got {r!r}")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def zeros(cls, m: int) -> "RadiusAssignment":
        return cls((0.0,) * m)

    def replace(self, index: int, radius: float) -> "RadiusAssignment":
        radii = list(self.radii)
        radii[index] = radius
        return RadiusAssignment(tuple(radii))

    def as_array(self) -> np.ndarray:
        return np.array(self.radii, dtype=float)

    def __len__(self) -> int:
        return len(self.radii)

    def __getitem__(self, i: int) -> float:
        return self.radii[i]

    def check_for(self, scenario: Scenario) -> None:
        if len(self.radii) != scenario.m:
            raise ValueError(
                f"radius assignment has {len(self.radii)} entries, scenario has {scenario.m} chargers"
            )


def _check_point(name: str, p: Sequence[float]) -> tuple[float, float]:
    x, y = (float(c) for c in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"{name} has non-finite coordinates: {p!r}")
    return x, y


def charging_rate(
    params: PhysicsParams,
    charger_pos: Sequence[float],
    radius: float,
    target_pos: Sequence[float],
    active: bool = True,
) -> float:
    """Power harvested at ``target_pos`` from a charger at ``charger_pos``.

    Returns ``alpha * radius**2 / (beta + dist)**2`` when the link is active and
    the target lies within ``radius``; zero otherwise.
    """
    cx, cy = _check_point("charger_pos", charger_pos)
    tx, ty = _check_point("target_pos", target_pos)
    if not math.isfinite(radius) or radius < 0:
        raise ValueError(f"radius must be finite and non-negative, got {radius!r}")
    if not active:
        return 0.0
    dist = math.hypot(tx - cx, ty - cy)
    if dist > radius:
        return 0.0
    return params.alpha * radius**2 / (params.beta + dist) ** 2


def rate_matrix(scenario: Scenario, radii: RadiusAssignment, distances: np.ndarray | None = None) -> np.ndarray:
    """Vectorised ``charging_rate`` for every (charger, node) pair, all links active."""
    radii.check_for(scenario)
    d = scenario.distances() if distances is None else distances
    r = radii.as_array()[:, None]
    p = scenario.params
    return np.where(d <= r, p.alpha * r**2 / (p.beta + d) ** 2, 0.0)


def validate_scenario(scenario: Scenario) -> list[str]:
    """Return every violated invariant of ``scenario``; empty means valid."""
    problems: list[str] = []
    p = scenario.params
    for name in ("alpha", "beta", "gamma"):
        value = getattr(p, name)
        if not (math.isfinite(value) and value > 0):
            problems.append(f"{name} must be positive (got {value!r})")
    if math.isnan(p.rho) or p.rho < 0:
        problems.append(f"rho must be non-negative (got {p.rho!r})")

    a = scenario.area
    bounds = (a.x_min, a.y_min, a.x_max, a.y_max)
    if not all(math.isfinite(b) for b in bounds):
        problems.append("area bounds must be finite")
    elif a.x_min > a.x_max or a.y_min > a.y_max:
        problems.append("area bounds are inverted")

    for kind, items, attr in (
        ("charger", scenario.chargers, "initial_energy"),
        ("node", scenario.nodes, "initial_capacity"),
    ):
        ids = [it.id for it in items]
        if sorted(ids) != list(range(len(items))):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            if dupes:
                problems.append(f"duplicate {kind} ids: {dupes}")
            problems.append(f"{kind} ids must be 0..{len(items) - 1}")
        for it in items:
            x, y = it.position
            if not (math.isfinite(x) and math.isfinite(y)):
                problems.append(f"{kind} {it.id} has non-finite position")
            elif not a.contains(it.position):
                problems.append(f"{kind} {it.id} lies outside the area")
            value = getattr(it, attr)
            if not math.isfinite(value) or value < 0:
                label = "energy" if kind == "charger" else "capacity"
                problems.append(f"{kind} {it.id} has negative or non-finite {label} ({value!r})")
    return problems


def fig1_scenario() -> Scenario:
    """Two chargers, two collinear nodes: v1=(0,0), u1=(1,0), v2=(2,0), u2=(3,0).

    Unit energies and capacities, alpha=beta=gamma=1, rho=2. Under these values
    radii (1, sqrt 2) move 5/3 units of energy while (1, 1) move only 3/2.
    """
    chargers = (Charger(0, (1.0, 0.0), 1.0), Charger(1, (3.0, 0.0), 1.0))
    nodes = (Node(0, (0.0, 0.0), 1.0), Node(1, (2.0, 0.0), 1.0))
    return Scenario(chargers, nodes, PhysicsParams(1.0, 1.0, 1.0, 2.0), Area(0.0, -0.5, 3.0, 0.5))


# --- JSON (de)serialisation -------------------------------------------------


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    p, a = scenario.params, scenario.area
    return {
        "params": {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "rho": p.rho},
        "area": {"x_min": a.x_min, "y_min": a.y_min, "x_max": a.x_max, "y_max": a.y_max},
        "chargers": [
            {"id": c.id, "x": c.position[0], "y": c.position[1], "energy": c.initial_energy}
            for c in scenario.chargers
        ],
        "nodes": [
            {"id": v.id, "x": v.position[0], "y": v.position[1], "capacity": v.initial_capacity}
            for v in scenario.nodes
        ],
    }


def scenario_from_dict(data: dict[str, Any], validate: bool = True) -> Scenario:
    try:
        p = data["params"]
        a = data["area"]
        params = PhysicsParams(float(p["alpha"]), float(p["beta"]), float(p["gamma"]), float(p["rho"]))
        area = Area(float(a["x_min"]), float(a["y_min"]), float(a["x_max"]), float(a["y_max"]))
        chargers = tuple(
            Charger(int(c["id"]), (float(c["x"]), float(c["y"])), float(c["energy"]))
            for c in data["chargers"]
        )
        nodes = tuple(
            Node(int(v["id"]), (float(v["x"]), float(v["y"])), float(v["capacity"])) for v in data["nodes"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError([f"malformed scenario: {exc!r}"]) from exc
    # keep list order == id order so array indices match ids
    scenario = Scenario(
        tuple(sorted(chargers, key=lambda c: c.id)), tuple(sorted(nodes, key=lambda v: v.id)), params, area
    )
    if validate:
        problems = validate_scenario(scenario)
        if problems:
            raise ScenarioError(problems)
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def dump_scenario(scenario: Scenario, path: str | Path | None = None) -> str:
    text = json.dumps(scenario_to_dict(scenario), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
