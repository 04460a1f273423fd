"""Exact event-driven evaluation of the charging dynamics.

Between two events every link has a constant rate, so the state can be
advanced in closed form to the next moment a charger runs dry or a node
fills up. Each step zeroes at least one entity, bounding the loop by n + m.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .model import RadiusAssignment, Scenario, rate_matrix

# Entities whose zero-crossing time lies within this window of the step are
# processed together.
SIMULTANEITY_TOL = 1e-12
# Residuals down to -CLAMP_TOL are float noise and get clamped to zero.
CLAMP_TOL = 1e-12

CHARGER_DEPLETED = "charger-depleted"
NODE_FULL = "node-full"


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    id: int


@dataclass(frozen=True)
class NetworkState:
    time: float
    charger_energy: np.ndarray
    node_residual_capacity: np.ndarray
    depleted_chargers: frozenset[int]
    full_nodes: frozenset[int]

    @classmethod
    def from_arrays(cls, time: float, energy: np.ndarray, capacity: np.ndarray) -> "NetworkState":
        e = np.array(energy, dtype=float)
        c = np.array(capacity, dtype=float)
        e.flags.writeable = False
        c.flags.writeable = False
        return cls(
            float(time),
            e,
            c,
            frozenset(int(i) for i in np.flatnonzero(e == 0)),
            frozenset(int(i) for i in np.flatnonzero(c == 0)),
        )


@dataclass(frozen=True)
class SimulationResult:
    objective: float
    completion_time: float
    events: tuple[Event, ...]
    final_state: NetworkState
    state_snapshots: tuple[NetworkState, ...] = field(repr=False)
    initial_energy: np.ndarray = field(repr=False)
    initial_capacity: np.ndarray = field(repr=False)

    @property
    def delivered(self) -> np.ndarray:
        """Energy stored by each node at the end of charging."""
        return self.initial_capacity - self.final_state.node_residual_capacity

    def transferred_at(self, state: NetworkState) -> float:
        return float(np.sum(self.initial_energy - state.charger_energy))

    def to_dict(self) -> dict[str, Any]:
        return {
            "objective": self.objective,
            "completion_time": self.completion_time,
            "events": [{"t": e.time, "kind": e.kind, "id": e.id} for e in self.events],
            "final": {
                "charger_energy": [float(x) for x in self.final_state.charger_energy],
                "node_energy": [float(x) for x in self.delivered],
            },
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def evolve(
    rates: np.ndarray,
    energy: np.ndarray,
    capacity: np.ndarray,
    record: bool = True,
) -> SimulationResult:
    """Run the event loop on a precomputed ``(m, n)`` rate matrix.

    ``rates[u, v]`` is the charging rate of the link while both ends are live,
    zero for out-of-range pairs. With ``record=False`` only the final state is
    kept (used by the planners' inner loops).
    """
    e0 = np.asarray(energy, dtype=float)
    c0 = np.asarray(capacity, dtype=float)
    E = e0.copy()
    C = c0.copy()
    live_links = rates > 0
    t = 0.0
    events: list[Event] = []
    snapshots = [NetworkState.from_arrays(0.0, E, C)] if record else []
    max_steps = E.size + C.size

    for _ in range(max_steps + 1):
        link = live_links & (E > 0)[:, None] & (C > 0)[None, :]
        if not link.any():
            break
        P = np.where(link, rates, 0.0)
        outflow = P.sum(axis=1)
        inflow = P.sum(axis=0)

        with np.errstate(divide="ignore", invalid="ignore"):
            t_charger = np.where(outflow > 0, E / outflow, np.inf)
            t_node = np.where(inflow > 0, C / inflow, np.inf)
        t0 = float(min(t_charger.min(), t_node.min()))

        E = E - t0 * outflow
        C = C - t0 * inflow
        hit_c = t_charger <= t0 + SIMULTANEITY_TOL
        hit_v = t_node <= t0 + SIMULTANEITY_TOL
        E[hit_c] = 0.0
        C[hit_v] = 0.0
        for arr, what in ((E, "charger energy"), (C, "node capacity")):
            bad = arr < -CLAMP_TOL
            if bad.any():
                raise EngineError(f"{what} went negative: {arr[bad]}")
            arr[arr < 0] = 0.0

        t += t0
        events.extend(Event(t, CHARGER_DEPLETED, int(i)) for i in np.flatnonzero(hit_c))
        events.extend(Event(t, NODE_FULL, int(i)) for i in np.flatnonzero(hit_v))
        if record:
            snapshots.append(NetworkState.from_arrays(t, E, C))
    else:
        raise EngineError("event loop exceeded n + m iterations")

    final = NetworkState.from_arrays(t, E, C)
    if not record:
        snapshots = [final]
    return SimulationResult(
        objective=float(np.sum(e0 - E)),
        completion_time=t,
        events=tuple(events),
        final_state=final,
        state_snapshots=tuple(snapshots),
        initial_energy=e0,
        initial_capacity=c0,
    )


def simulate(scenario: Scenario, radii: RadiusAssignment) -> SimulationResult:
    """Exact charging outcome of ``scenario`` under the given charger radii."""
    radii.check_for(scenario)
    return evolve(rate_matrix(scenario, radii), scenario.initial_energy, scenario.initial_capacity)


def objective_curve(result: SimulationResult, sample_times: Sequence[float]) -> list[tuple[float, float]]:
    """Cumulative transferred energy at each of ``sample_times``.

    Rates are constant between events, so linear interpolation between the
    stored snapshots is exact.
    """
    times = np.asarray(sample_times, dtype=float)
    if times.size and (np.any(times < 0) or np.any(np.diff(times) < 0)):
        raise ValueError("sample_times must be non-negative and sorted")
    snap_t = np.array([s.time for s in result.state_snapshots])
    snap_v = np.array([result.transferred_at(s) for s in result.state_snapshots])
    values = np.interp(times, snap_t, snap_v, right=result.objective)
    return [(float(t), float(v)) for t, v in zip(times, values)]


def horizon_bound(scenario: Scenario) -> float:
    """Radius-independent upper bound on the completion time of the charging."""
    if scenario.m == 0 or scenario.n == 0:
        raise ValueError("need at least one charger and one node")
    d = scenario.distances()
    d_min = float(d.min())
    if d_min == 0:
        raise ValueError("a node is co-located with a charger; the bound is undefined")
    p = scenario.params
    scale = max(float(scenario.initial_energy.max()), float(scenario.initial_capacity.max()))
    return (p.beta + float(d.max())) ** 2 / (p.alpha * d_min**2) * scale


def active_chargers(scenario: Scenario, radii: RadiusAssignment, state: NetworkState) -> frozenset[int]:
    """Chargers still emitting in ``state``: energy left and a non-full node in range."""
    live = rate_matrix(scenario, radii) > 0
    live &= (state.node_residual_capacity > 0)[None, :]
    has_target = live.any(axis=1)
    return frozenset(int(u) for u in np.flatnonzero(has_target & (state.charger_energy > 0)))
