"""Radius planners: per-charger line search, iterative local improvement,
the charging-oriented baseline and a tiny-instance exhaustive search."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .engine import evolve, simulate
from .lrdc import compute_frontiers
from .model import RadiusAssignment, Scenario, rate_matrix
from .radiation import accumulate, contributions, get_kernel, sample_points, within_cap

log = logging.getLogger(__name__)

# relative objective difference below which two candidates count as tied
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PlannerConfig:
    l: int = 100
    K: int = 1000
    K_prime: int = 100
    seed: int = 0
    kernel: str = "default-eq3"

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("l must be at least 1")
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.K_prime < 0:
            raise ValueError("K_prime must be non-negative")
        get_kernel(self.kernel)


@dataclass(frozen=True)
class RadiusChoice:
    radius: float
    objective: float
    context_infeasible: bool = False


@dataclass(frozen=True)
class LrecPlan:
    radii: RadiusAssignment
    objective: float
    trace: tuple[float, ...] = ()
    picks: tuple[int, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {"radii": list(self.radii.radii), "objective": self.objective, "trace": list(self.trace)}


class _LineSearch:
    """Cached state for repeated single-charger radius searches.

    Keeps the rate matrix and per-charger radiation rows of the current
    assignment so a candidate only recomputes one row. Fields are rebuilt
    in charger order, so every value equals what ``radiation.max_radiation``
    would report for the same assignment.
    """

    def __init__(self, scenario: Scenario, radii: RadiusAssignment, config: PlannerConfig):
        radii.check_for(scenario)
        self.scenario = scenario
        self.config = config
        self.kernel = get_kernel(config.kernel)
        self.radii = list(radii.radii)
        self.dist = scenario.distances()
        self.energy = scenario.initial_energy
        self.capacity = scenario.initial_capacity
        self.points = sample_points(scenario, config.K, config.seed)
        self.rates = rate_matrix(scenario, radii, self.dist)
        self.rows = contributions(scenario, radii, self.points, None, self.kernel)
        self.r_max = [scenario.area.farthest_distance(c.position) for c in scenario.chargers]

    def _rate_row(self, u: int, r: float) -> np.ndarray:
        single = RadiusAssignment((r,))
        p = self.scenario.params
        rr = single.as_array()[:, None]
        d = self.dist[u : u + 1]
        return np.where(d <= rr, p.alpha * rr**2 / (p.beta + d) ** 2, 0.0)[0]

    def _radiation_row(self, u: int, r: float) -> np.ndarray:
        pos = self.scenario.charger_positions[u]
        return self.kernel(self.scenario.params, pos, r, self.points, True)

    def peak_radiation(self, u: int, candidates: list[float]) -> np.ndarray:
        """Sampled maximum of the field for each candidate radius of ``u``."""
        prefix = accumulate(self.rows[:u], len(self.points))
        total = prefix[None, :] + np.array([self._radiation_row(u, r) for r in candidates])
        for w in range(u + 1, self.scenario.m):
            total = total + self.rows[w]
        return total.max(axis=1) if total.shape[1] else np.zeros(len(candidates))

    def objective(self, u: int, r: float) -> float:
        rates = self.rates.copy()
        rates[u] = self._rate_row(u, r)
        return evolve(rates, self.energy, self.capacity, record=False).objective

    def current_objective(self) -> float:
        return evolve(self.rates, self.energy, self.capacity, record=False).objective

    def assign(self, u: int, r: float) -> None:
        self.radii[u] = r
        self.rates[u] = self._rate_row(u, r)
        self.rows[u] = self._radiation_row(u, r)

    def grid(self, u: int) -> list[float]:
        l = self.config.l
        return [(i / l) * self.r_max[u] for i in range(l + 1)]

    def best_radius(self, u: int) -> RadiusChoice:
        rho = self.scenario.params.rho
        incumbent = self.radii[u]
        grid = self.grid(u)
        candidates = grid if incumbent in grid else grid + [incumbent]
        peaks = self.peak_radiation(u, candidates)
        ok = [within_cap(float(pk), rho) for pk in peaks]

        if not any(ok):
            return RadiusChoice(0.0, self.objective(u, 0.0), context_infeasible=True)

        scored = [(r, self.objective(u, r)) for r, good in zip(candidates, ok) if good]
        top = max(obj for _, obj in scored)
        tol = TIE_RTOL * max(1.0, abs(top))
        radius, value = min(((r, obj) for r, obj in scored if obj >= top - tol), key=lambda t: t[0])

        inc_ok = ok[candidates.index(incumbent)]
        if inc_ok:
            inc_value = next(obj for r, obj in scored if r == incumbent)
            if value < inc_value:
                radius, value = incumbent, inc_value
        return RadiusChoice(radius, value)


def best_radius_for(
    u: int, fixed: RadiusAssignment, scenario: Scenario, config: PlannerConfig = PlannerConfig()
) -> RadiusChoice:
    """Best radiation-feasible radius for charger ``u`` with all other radii held.

    Scans ``(i / l) * r_max`` for ``i = 0..l`` plus the current radius of ``u``,
    where ``r_max`` is the distance from ``u`` to the farthest corner of the
    area. Equal objectives resolve to the smaller radius, and a feasible
    incumbent is never replaced by something worse. If no candidate passes
    the radiation check, radius 0 is returned with ``context_infeasible`` set.
    """
    if not 0 <= u < scenario.m:
        raise IndexError(f"charger {u} out of range")
    return _LineSearch(scenario, fixed, config).best_radius(u)


def iterative_lrec(scenario: Scenario, config: PlannerConfig = PlannerConfig()) -> LrecPlan:
    """Local improvement: repeatedly re-optimise the radius of a random charger.

    Starts from all radii at zero and runs ``K_prime`` iterations; each picks a
    charger uniformly at random (with replacement) and applies
    :func:`best_radius_for` to it. The trace holds the objective after every
    iteration.
    """
    m = scenario.m
    search = _LineSearch(scenario, RadiusAssignment.zeros(m), config)
    if m == 0 or config.K_prime == 0:
        return LrecPlan(RadiusAssignment.zeros(m), 0.0 if m == 0 else search.current_objective())

    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
    picks = rng.integers(0, m, size=config.K_prime)
    trace = []
    for it, u in enumerate(picks):
        choice = search.best_radius(int(u))
        if choice.context_infeasible:
            log.warning("iteration %d: charger %d has no feasible radius", it, u)
        search.assign(int(u), choice.radius)
        trace.append(choice.objective)
    radii = RadiusAssignment(tuple(search.radii))
    return LrecPlan(radii, simulate(scenario, radii).objective, tuple(trace), tuple(int(u) for u in picks))


def charging_oriented(scenario: Scenario) -> RadiusAssignment:
    """Each charger takes the distance to the furthest node it may reach on its own."""
    radii = []
    for f in compute_frontiers(scenario):
        if f.i_rad is None:
            radii.append(0.0)
        else:
            radii.append(f.distances[f.order.index(f.i_rad)])
    return RadiusAssignment(tuple(radii))


def exhaustive_search(scenario: Scenario, config: PlannerConfig = PlannerConfig(), c: int = 4) -> LrecPlan:
    """Best feasible point of the full ``(l + 1) ** m`` radius grid. Test oracle only."""
    if c > 4:
        raise ValueError("exhaustive search is limited to c <= 4 chargers")
    if scenario.m > c:
        raise ValueError(f"scenario has {scenario.m} chargers, more than the limit c={c}")
    search = _LineSearch(scenario, RadiusAssignment.zeros(scenario.m), config)
    grids = [search.grid(u) for u in range(scenario.m)]
    rows = [[search._radiation_row(u, r) for r in grids[u]] for u in range(scenario.m)]
    rho = scenario.params.rho
    n_pts = len(search.points)

    best: tuple[float, tuple[float, ...]] | None = None
    for idx in itertools.product(*(range(len(g)) for g in grids)):
        field_ = accumulate([rows[u][i] for u, i in enumerate(idx)], n_pts)
        if not within_cap(float(field_.max()) if n_pts else 0.0, rho):
            continue
        radii = RadiusAssignment(tuple(grids[u][i] for u, i in enumerate(idx)))
        value = evolve(rate_matrix(scenario, radii, search.dist), search.energy, search.capacity, False).objective
        if best is None or value > best[0]:
            best = (value, radii.radii)
    if best is None:
        zeros = RadiusAssignment.zeros(scenario.m)
        return LrecPlan(zeros, simulate(scenario, zeros).objective)
    return LrecPlan(RadiusAssignment(best[1]), best[0])
