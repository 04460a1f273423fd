import json

import numpy as np
import pytest

from oracles import lrdc_lp_reference
from wet_radsim.lrdc import (
    check_constraints,
    compute_frontiers,
    lrdc_brute_force,
    lrdc_objective,
    make_assignment,
    round_lrdc,
    solve_lrdc_lp,
)
from wet_radsim.model import Area, Charger, Node, PhysicsParams, Scenario


def lrdc_instance(seed, m_max=3, n_max=8, side=3.0):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    chargers = tuple(Charger(i, tuple(map(float, rng.random(2) * side)), float(rng.uniform(0.5, 3))) for i in range(m))
    nodes = tuple(Node(i, tuple(map(float, rng.random(2) * side)), float(rng.uniform(0.2, 1.5))) for i in range(n))
    params = PhysicsParams(1.0, 1.0, float(rng.uniform(0.2, 1.0)), float(rng.uniform(0.3, 2.0)))
    return Scenario(chargers, nodes, params, Area(0, 0, side, side))


def line_scenario(energy=1.0, capacities=(1.0, 1.0), rho=2.0):
    nodes = tuple(Node(i, (float(i + 1), 0.0), c) for i, c in enumerate(capacities))
    return Scenario((Charger(0, (0.0, 0.0), energy),), nodes, PhysicsParams(1, 1, 1, rho), Area(0, -1, 5, 1))


def test_fig1_frontiers(fig1):
    f1, f2 = compute_frontiers(fig1)
    assert f1.order == (0, 1) and f1.i_rad == 1 and f1.i_nrg == 0
    assert f2.order == (1, 0) and f2.i_rad == 1 and f2.i_nrg == 1
    assert f1.allowed() == (0,) and f2.allowed() == (1,)
    assert f1.saturates and f2.saturates


def test_distance_ties_resolved_by_id():
    s = Scenario(
        (Charger(0, (0.0, 0.0), 1.0),),
        (Node(0, (1.0, 0.0), 1.0), Node(1, (0.0, 1.0), 1.0), Node(2, (-1.0, 0.0), 1.0)),
        PhysicsParams(1, 1, 1, 10),
        Area(-2, -2, 2, 2),
    )
    assert compute_frontiers(s)[0].order == (0, 1, 2)
    assert compute_frontiers(s) == compute_frontiers(s)


def test_no_saturation_uses_last_node():
    f, = compute_frontiers(line_scenario(energy=5.0, capacities=(1.0, 1.0), rho=100))
    assert f.i_nrg == 1 and not f.saturates
    assert f.coefficients == (1.0, 1.0)


def test_zero_cap_allows_nothing(fig1):
    frontiers = compute_frontiers(fig1.with_params(rho=0.0))
    assert all(f.i_rad is None and f.limit == 0 for f in frontiers)


def test_objective_full_energy_when_reaching_i_nrg(fig1):
    a = make_assignment(fig1, {0: 0, 1: 1})
    assert a.objective == 2.0
    assert a.radii.radii == (1.0, 1.0)


def test_objective_capacity_sum_before_i_nrg():
    s = line_scenario(energy=1.0, capacities=(0.4, 1.0), rho=100)
    f, = compute_frontiers(s)
    assert f.i_nrg == 1
    assert lrdc_objective(s, make_assignment(s, {0: 0})) == pytest.approx(0.4)
    assert lrdc_objective(s, make_assignment(s, {0: 0, 1: 0})) == pytest.approx(1.0)


def test_fig1_chain(fig1):
    lp = solve_lrdc_lp(fig1)
    assert lp.objective == pytest.approx(2.0)
    rounded = round_lrdc(fig1, lp)
    assert rounded.objective == 2.0
    assert lrdc_brute_force(fig1).objective == 2.0
    assert check_constraints(fig1, rounded) == []


def test_zero_cap_gives_empty_assignment(fig1):
    s = fig1.with_params(rho=0.0)
    best = lrdc_brute_force(s)
    assert best.assignment == {} and best.objective == 0.0
    assert round_lrdc(s, solve_lrdc_lp(s)).objective == 0.0


def test_integral_input_rounds_to_itself(fig1):
    x = np.zeros((2, 2))
    x[0, 0] = x[1, 1] = 1.0
    assert round_lrdc(fig1, x).assignment == {0: 0, 1: 1}


def test_colocated_chargers_share_one_node():
    s = Scenario(
        (Charger(0, (0.0, 0.0), 1.0), Charger(1, (0.0, 0.0), 1.0)),
        (Node(0, (1.0, 0.0), 1.0),),
        PhysicsParams(1, 1, 1, 2),
        Area(-2, -2, 2, 2),
    )
    rounded = round_lrdc(s, np.ones((2, 1)))
    assert rounded.assignment == {0: 0}
    assert check_constraints(s, rounded) == []


def test_structural_checks_catch_violations(fig1):
    # v2 for u1 skips v1, and lies past u1's energy frontier
    bad = make_assignment(fig1, {1: 0})
    problems = check_constraints(fig1, bad)
    assert any("prefix" in p for p in problems)
    assert any("beyond" in p for p in problems)


def test_assignment_json(fig1):
    data = json.loads(make_assignment(fig1, {0: 0, 1: 1}).to_json())
    assert data == {"pairs": [{"node": 0, "charger": 0}, {"node": 1, "charger": 1}], "radii": [1.0, 1.0], "objective": 2.0}


@pytest.mark.parametrize("seed", range(20))
def test_lp_matches_reference_solver(seed):
    s = lrdc_instance(seed)
    frontiers = compute_frontiers(s)
    assert solve_lrdc_lp(s, frontiers).objective == pytest.approx(lrdc_lp_reference(s, frontiers), abs=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_bound_chain_on_random_instances(seed):
    s = lrdc_instance(1000 + seed, m_max=2, n_max=4)
    lp = solve_lrdc_lp(s)
    best = lrdc_brute_force(s)
    rounded = round_lrdc(s, lp)
    assert lp.objective >= best.objective - 1e-9
    assert best.objective >= rounded.objective - 1e-12
    assert check_constraints(s, rounded) == []
    assert check_constraints(s, best) == []
