"""Disjoint-charging relaxation: each node may be served by at most one charger.

Every charger ``u`` sorts the nodes by distance (ties by node id) and may only
take a prefix of that order. The prefix is bounded by two frontier nodes:

* ``i_rad``: the furthest node ``u`` reaches without breaking the radiation cap
  on its own;
* ``i_nrg``: the first node at which the cumulative capacity of the prefix
  covers ``u``'s energy; nothing past it is worth charging.

The integer program over prefix indicators ``x[u, v]`` is solved by an LP
relaxation followed by a greedy rounding; a brute-force search provides the
exact optimum on small instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

import numpy as np

from .model import RadiusAssignment, Scenario
from .simplex import LPError, solve_lp

SUPPORT_TOL = 1e-9
BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class ChargerFrontiers:
    charger: int
    order: tuple[int, ...]
    distances: tuple[float, ...]
    i_rad: int | None
    i_nrg: int | None
    # False when all nodes together cannot absorb the charger's energy; i_nrg
    # is then the last node and the charger never empties
    saturates: bool
    coefficients: tuple[float, ...]

    @property
    def limit(self) -> int:
        """Number of leading positions of ``order`` the charger may take."""
        if self.i_rad is None or self.i_nrg is None:
            return 0
        return min(self.order.index(self.i_rad), self.order.index(self.i_nrg)) + 1

    def allowed(self) -> tuple[int, ...]:
        return self.order[: self.limit]

    def to_dict(self) -> dict[str, Any]:
        return {
            "charger": self.charger,
            "order": list(self.order),
            "i_rad": self.i_rad,
            "i_nrg": self.i_nrg,
        }


@dataclass(frozen=True)
class LrdcAssignment:
    assignment: Mapping[int, int]  # node id -> charger id
    radii: RadiusAssignment
    objective: float

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.assignment.items())

    def nodes_of(self, u: int) -> list[int]:
        return [v for v, w in self.pairs() if w == u]

    def to_dict(self) -> dict[str, Any]:
        return {
            "pairs": [{"node": v, "charger": u} for v, u in self.pairs()],
            "radii": list(self.radii.radii),
            "objective": self.objective,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class FractionalSolution:
    x: np.ndarray  # shape (m, n)
    objective: float
    iterations: int


def compute_frontiers(scenario: Scenario) -> list[ChargerFrontiers]:
    d = scenario.distances()
    cap = scenario.params.solo_radius_cap
    capacity = scenario.initial_capacity
    out = []
    for u, charger in enumerate(scenario.chargers):
        order = sorted(range(scenario.n), key=lambda v: (d[u, v], v))
        dist = [float(d[u, v]) for v in order]

        reach = [k for k, dv in enumerate(dist) if dv <= cap]
        i_rad = order[reach[-1]] if reach else None

        energy = charger.initial_energy
        cum = np.cumsum([capacity[v] for v in order])
        hits = np.flatnonzero(cum >= energy)
        saturates = hits.size > 0
        if order:
            k_nrg = int(hits[0]) if saturates else len(order) - 1
            i_nrg = order[k_nrg]
        else:
            k_nrg, i_nrg = -1, None

        coefs = []
        before = 0.0
        for k in range(k_nrg + 1):
            c = float(capacity[order[k]])
            coefs.append(min(c, energy - before))
            before += c
        out.append(
            ChargerFrontiers(u, tuple(order), tuple(dist), i_rad, i_nrg, bool(saturates), tuple(coefs))
        )
    return out


def make_assignment(
    scenario: Scenario, pairs: Mapping[int, int] | Iterable[tuple[int, int]]
) -> LrdcAssignment:
    """Wrap a node -> charger mapping with its induced radii and objective."""
    mapping = dict(pairs)
    d = scenario.distances()
    radii = [0.0] * scenario.m
    for v, u in mapping.items():
        radii[u] = max(radii[u], float(d[u, v]))
    partial = LrdcAssignment(mapping, RadiusAssignment(tuple(radii)), 0.0)
    return LrdcAssignment(mapping, partial.radii, lrdc_objective(scenario, partial))


def lrdc_objective(
    scenario: Scenario, assignment: LrdcAssignment, frontiers: list[ChargerFrontiers] | None = None
) -> float:
    """Per charger: its full energy once the prefix reaches ``i_nrg``, else the prefix capacity."""
    frontiers = compute_frontiers(scenario) if frontiers is None else frontiers
    capacity = scenario.initial_capacity
    total = 0.0
    for f in frontiers:
        mine = assignment_nodes(assignment, f.charger)
        if not mine:
            continue
        if f.saturates and f.i_nrg in mine:
            total += scenario.chargers[f.charger].initial_energy
        else:
            total += float(sum(capacity[v] for v in mine))
    return total


def assignment_nodes(assignment: LrdcAssignment, u: int) -> set[int]:
    return {v for v, w in assignment.assignment.items() if w == u}


def check_constraints(
    scenario: Scenario, assignment: LrdcAssignment, frontiers: list[ChargerFrontiers] | None = None
) -> list[str]:
    """List violations of uniqueness, prefix closure and the frontier bound."""
    frontiers = compute_frontiers(scenario) if frontiers is None else frontiers
    problems = []
    for v, u in assignment.assignment.items():
        if not (0 <= u < scenario.m and 0 <= v < scenario.n):
            problems.append(f"pair ({v}, {u}) references unknown ids")
    # a mapping cannot give a node two chargers; uniqueness holds by construction
    for f in frontiers:
        mine = assignment_nodes(assignment, f.charger)
        if not mine:
            continue
        positions = sorted(f.order.index(v) for v in mine)
        if positions != list(range(len(positions))):
            problems.append(f"charger {f.charger}: assigned nodes are not a prefix of its order")
        if positions[-1] >= f.limit:
            problems.append(f"charger {f.charger}: node beyond i_rad/i_nrg assigned")
    return problems


def _lp_layout(scenario: Scenario, frontiers: list[ChargerFrontiers]):
    index: dict[tuple[int, int], int] = {}
    coef = []
    for f in frontiers:
        for k, v in enumerate(f.allowed()):
            index[(f.charger, v)] = len(coef)
            coef.append(f.coefficients[k])
    rows = []
    for v in range(scenario.n):
        cols = [index[(u, v)] for u in range(scenario.m) if (u, v) in index]
        if cols:
            row = np.zeros(len(coef))
            row[cols] = 1.0
            rows.append((row, 1.0))
    for f in frontiers:
        allowed = f.allowed()
        for k in range(1, len(allowed)):
            row = np.zeros(len(coef))
            row[index[(f.charger, allowed[k])]] = 1.0
            row[index[(f.charger, allowed[k - 1])]] = -1.0
            rows.append((row, 0.0))
    A = np.array([r for r, _ in rows]).reshape(len(rows), len(coef))
    b = np.array([rhs for _, rhs in rows], dtype=float)
    return index, np.array(coef, dtype=float), A, b


def solve_lrdc_lp(scenario: Scenario, frontiers: list[ChargerFrontiers] | None = None) -> FractionalSolution:
    """Optimal fractional prefix indicators; the objective bounds the integer optimum from above."""
    frontiers = compute_frontiers(scenario) if frontiers is None else frontiers
    index, c, A, b = _lp_layout(scenario, frontiers)
    x = np.zeros((scenario.m, scenario.n))
    if not index:
        return FractionalSolution(x, 0.0, 0)
    try:
        res = solve_lp(c, A, b)
    except LPError as exc:
        raise LPError(f"LRDC relaxation failed: {exc}") from exc
    for (u, v), j in index.items():
        x[u, v] = min(1.0, max(0.0, res.x[j]))
    return FractionalSolution(x, res.objective, res.iterations)


def round_lrdc(
    scenario: Scenario,
    fractional: FractionalSolution | np.ndarray,
    frontiers: list[ChargerFrontiers] | None = None,
) -> LrdcAssignment:
    """Greedy rounding that keeps every constraint of the integer program.

    Chargers go in order of decreasing LP mass (ties by id). Each walks its
    order claiming nodes while they carry positive LP weight, are still free
    and lie inside its frontier; the walk stops at the first node failing
    any of these.
    """
    frontiers = compute_frontiers(scenario) if frontiers is None else frontiers
    x = fractional.x if isinstance(fractional, FractionalSolution) else np.asarray(fractional, dtype=float)
    mass = x.sum(axis=1) if x.size else np.zeros(scenario.m)
    ranking = sorted(range(scenario.m), key=lambda u: (-round(float(mass[u]), 9), u))
    claimed: dict[int, int] = {}
    for u in ranking:
        for v in frontiers[u].allowed():
            if x[u, v] <= SUPPORT_TOL or v in claimed:
                break
            claimed[v] = u
    return make_assignment(scenario, claimed)


def lrdc_brute_force(scenario: Scenario, frontiers: list[ChargerFrontiers] | None = None) -> LrdcAssignment:
    """Exact optimum by enumerating every charger's prefix length."""
    frontiers = compute_frontiers(scenario) if frontiers is None else frontiers
    size = 1
    for f in frontiers:
        size *= f.limit + 1
    if size > BRUTE_FORCE_LIMIT:
        raise ValueError(f"search space of {size} prefix combinations is too large")

    best_value = -1.0
    best: dict[int, int] = {}
    # value_of[u][L] = objective contributed by taking the first L allowed nodes
    value_of = [np.concatenate([[0.0], np.cumsum(f.coefficients[: f.limit])]) for f in frontiers]

    def search(u: int, taken: dict[int, int], value: float) -> None:
        nonlocal best_value, best
        if u == scenario.m:
            if value > best_value:
                best_value, best = value, dict(taken)
            return
        allowed = frontiers[u].allowed()
        search(u + 1, taken, value)
        added = []
        for L, v in enumerate(allowed, start=1):
            if v in taken:
                break
            taken[v] = u
            added.append(v)
            search(u + 1, taken, value + value_of[u][L])
        for v in added:
            del taken[v]

    search(0, {}, 0.0)
    return make_assignment(scenario, best)
