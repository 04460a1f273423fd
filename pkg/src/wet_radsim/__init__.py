"""Radiation-constrained wireless energy transfer: simulation and radius planning."""

from .engine import SimulationResult, horizon_bound, objective_curve, simulate
from .lrdc import compute_frontiers, lrdc_brute_force, lrdc_objective, round_lrdc, solve_lrdc_lp
from .model import (
    Area,
    Charger,
    Node,
    PhysicsParams,
    RadiusAssignment,
    Scenario,
    charging_rate,
    fig1_scenario,
    validate_scenario,
)
from .planners import PlannerConfig, best_radius_for, charging_oriented, exhaustive_search, iterative_lrec
from .radiation import feasible, max_radiation, radiation_at

__version__ = "0.1.0"
