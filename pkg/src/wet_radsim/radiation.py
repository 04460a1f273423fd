"""Radiation field of the chargers and a sampling estimate of its maximum.

The field at a point is the sum of one contribution per active charger. The
contribution law is pluggable: a kernel is any callable

    kernel(params, charger_pos, radius, points, active) -> ndarray

returning one non-negative value per row of ``points`` (shape ``(N, 2)``),
and all zeros when ``active`` is false.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Collection, Sequence

import numpy as np

from .model import PhysicsParams, RadiusAssignment, Scenario

Kernel = Callable[[PhysicsParams, np.ndarray, float, np.ndarray, bool], np.ndarray]

DEFAULT_SAMPLES = 1000
# A measured maximum counts as within the cap if it exceeds rho by at most
# this relative amount (sqrt(2)**2 is 2 + 4e-16 in binary floating point).
CAP_RTOL = 1e-9


def default_kernel(
    params: PhysicsParams, charger_pos: np.ndarray, radius: float, points: np.ndarray, active: bool
) -> np.ndarray:
    """``gamma`` times the charging rate a receiver at each point would see."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if not active or radius <= 0:
        return np.zeros(len(points))
    d = np.hypot(points[:, 0] - charger_pos[0], points[:, 1] - charger_pos[1])
    value = params.gamma * params.alpha * radius**2 / (params.beta + d) ** 2
    return np.where(d <= radius, value, 0.0)


KERNELS: dict[str, Kernel] = {"default-eq3": default_kernel, "default": default_kernel}


def get_kernel(name: str) -> Kernel:
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown radiation kernel {name!r}; known: {sorted(KERNELS)}") from None


@dataclass(frozen=True)
class RadiationEstimate:
    max_value: float
    argmax_point: tuple[float, float]
    samples: int
    seed: int


@dataclass(frozen=True)
class Feasibility:
    ok: bool
    estimate: RadiationEstimate

    @property
    def witness(self) -> tuple[float, float] | None:
        """Point of highest sampled radiation when the cap is violated."""
        return None if self.ok else self.estimate.argmax_point

    def __bool__(self) -> bool:
        return self.ok


def within_cap(value: float, rho: float) -> bool:
    return value <= rho * (1.0 + CAP_RTOL)


def sample_points(scenario: Scenario, K: int, seed: int) -> np.ndarray:
    """``K`` uniform points in the area followed by the charger centres.

    The uniform block for ``K`` is a prefix of the block for any larger ``K``
    under the same seed.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    a = scenario.area
    u = np.random.default_rng(seed).random((K, 2))
    pts = np.empty((K, 2))
    pts[:, 0] = a.x_min + u[:, 0] * (a.x_max - a.x_min)
    pts[:, 1] = a.y_min + u[:, 1] * (a.y_max - a.y_min)
    return np.vstack([pts, scenario.charger_positions])


def _active_mask(m: int, active: Collection[int] | None) -> list[bool]:
    if active is None:
        return [True] * m
    chosen = set(active)
    return [u in chosen for u in range(m)]


def contributions(
    scenario: Scenario,
    radii: RadiusAssignment,
    points: np.ndarray,
    active: Collection[int] | None = None,
    kernel: Kernel = default_kernel,
) -> np.ndarray:
    """Per-charger field values at ``points``, shape ``(m, N)``."""
    radii.check_for(scenario)
    mask = _active_mask(scenario.m, active)
    rows = np.zeros((scenario.m, len(points)))
    for u in range(scenario.m):
        rows[u] = kernel(scenario.params, scenario.charger_positions[u], radii[u], points, mask[u])
    return rows


def accumulate(rows: Sequence[np.ndarray] | np.ndarray, n_points: int | None = None) -> np.ndarray:
    """Sum per-charger rows in charger order.

    The planners rebuild fields incrementally and rely on this fixed summation
    order to reproduce the exact same floats.
    """
    total = np.zeros(n_points if n_points is not None else (len(rows[0]) if len(rows) else 0))
    for row in rows:
        total = total + row
    return total


def radiation_at(
    point: Sequence[float],
    scenario: Scenario,
    radii: RadiusAssignment,
    active: Collection[int] | None = None,
    kernel: Kernel = default_kernel,
) -> float:
    """Radiation at a single point; ``active=None`` means every charger emits."""
    if not scenario.area.contains(point):
        raise ValueError(f"point {tuple(point)} lies outside the area")
    pts = np.asarray(point, dtype=float).reshape(1, 2)
    return float(accumulate(contributions(scenario, radii, pts, active, kernel), 1)[0])


def max_radiation(
    scenario: Scenario,
    radii: RadiusAssignment,
    active: Collection[int] | None = None,
    K: int = DEFAULT_SAMPLES,
    seed: int = 0,
    kernel: Kernel = default_kernel,
) -> RadiationEstimate:
    pts = sample_points(scenario, K, seed)
    field = accumulate(contributions(scenario, radii, pts, active, kernel), len(pts))
    i = int(np.argmax(field))
    return RadiationEstimate(float(field[i]), (float(pts[i, 0]), float(pts[i, 1])), K, seed)


def feasible(
    scenario: Scenario,
    radii: RadiusAssignment,
    K: int = DEFAULT_SAMPLES,
    seed: int = 0,
    kernel: Kernel = default_kernel,
) -> Feasibility:
    """Check the radiation cap at time zero, when every charger is emitting."""
    est = max_radiation(scenario, radii, None, K, seed, kernel)
    return Feasibility(within_cap(est.max_value, scenario.params.rho), est)
