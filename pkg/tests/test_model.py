import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wet_radsim.model import (
    Area,
    Charger,
    Node,
    PhysicsParams,
    RadiusAssignment,
    Scenario,
    ScenarioError,
    charging_rate,
    dump_scenario,
    load_scenario,
    rate_matrix,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)

UNIT = PhysicsParams(1.0, 1.0, 1.0, 2.0)


def test_rate_at_unit_distance():
    assert charging_rate(UNIT, (0, 0), 1.0, (1, 0)) == pytest.approx(0.25, abs=1e-15)


def test_rate_at_own_location():
    assert charging_rate(UNIT, (3, 0), math.sqrt(2), (3, 0)) == pytest.approx(2.0, rel=1e-15)


def test_rate_out_of_range_is_zero():
    params = PhysicsParams(2.5, 0.3, 1.0, 1.0)
    assert charging_rate(params, (0, 0), 1.0, (1.0001, 0)) == 0.0


def test_inactive_link_is_zero():
    assert charging_rate(UNIT, (0, 0), 1.0, (1, 0), active=False) == 0.0


@pytest.mark.parametrize(
    "args",
    [
        ((math.nan, 0), 1.0, (0, 0)),
        ((0, 0), 1.0, (math.inf, 0)),
        ((0, 0), -0.5, (0, 0)),
        ((0, 0), math.nan, (0, 0)),
    ],
)
def test_rate_rejects_bad_input(args):
    pos, r, target = args
    with pytest.raises(ValueError):
        charging_rate(UNIT, pos, r, target)


finite = st.floats(min_value=0.01, max_value=10.0)


@given(r1=finite, r2=finite, d=st.floats(min_value=0, max_value=10))
def test_rate_monotone_in_radius(r1, r2, d):
    lo, hi = sorted((r1, r2))
    if d > lo:
        return
    assert charging_rate(UNIT, (0, 0), lo, (d, 0)) <= charging_rate(UNIT, (0, 0), hi, (d, 0))


@given(r=finite, d1=st.floats(0, 10), d2=st.floats(0, 10))
def test_rate_non_increasing_in_distance(r, d1, d2):
    near, far = sorted((d1, d2))
    if far > r:
        return
    assert charging_rate(UNIT, (0, 0), r, (far, 0)) <= charging_rate(UNIT, (0, 0), r, (near, 0))


@given(r=finite, frac=st.floats(0, 1))
def test_doubling_radius_quadruples_rate(r, frac):
    d = frac * r
    one = charging_rate(UNIT, (0, 0), r, (d, 0))
    two = charging_rate(UNIT, (0, 0), 2 * r, (d, 0))
    assert two == pytest.approx(4 * one, rel=1e-12)


def test_rate_continuous_up_to_radius_then_zero():
    r = 1.5
    inside = [charging_rate(UNIT, (0, 0), r, (r * (1 - 10.0**-k), 0)) for k in range(3, 9)]
    at_edge = charging_rate(UNIT, (0, 0), r, (r, 0))
    assert np.allclose(inside, at_edge, rtol=1e-2)
    assert at_edge == pytest.approx(r**2 / (1 + r) ** 2)
    assert charging_rate(UNIT, (0, 0), r, (r + 1e-9, 0)) == 0.0


def test_rate_matrix_matches_scalar_law(fig1):
    radii = RadiusAssignment((1.2, 0.7))
    P = rate_matrix(fig1, radii)
    for u, c in enumerate(fig1.chargers):
        for v, node in enumerate(fig1.nodes):
            assert P[u, v] == pytest.approx(charging_rate(fig1.params, c.position, radii[u], node.position))


def test_fig1_is_valid(fig1):
    assert validate_scenario(fig1) == []
    d = fig1.distances()
    # dist(v1,u1) = dist(v2,u1) = dist(v2,u2) = 1
    assert d[0, 0] == d[0, 1] == d[1, 1] == 1.0


def test_zero_beta_reported(fig1):
    problems = validate_scenario(fig1.with_params(beta=0.0))
    assert any("beta must be positive" in p for p in problems)


def test_node_outside_area_reported(fig1):
    nodes = fig1.nodes[:1] + (Node(1, (7.0, 0.0), 1.0),)
    bad = Scenario(fig1.chargers, nodes, fig1.params, fig1.area)
    problems = validate_scenario(bad)
    assert any("node 1" in p and "outside" in p for p in problems)


def test_all_violations_reported_together():
    bad = Scenario(
        (Charger(0, (0, 0), -1.0), Charger(0, (9, 9), 1.0)),
        (Node(0, (0.5, 0.5), 1.0),),
        PhysicsParams(0.0, 1.0, -1.0, -0.1),
        Area(0, 0, 1, 1),
    )
    problems = validate_scenario(bad)
    text = " | ".join(problems)
    for fragment in ("alpha", "gamma", "rho", "duplicate charger ids", "charger 0 has negative", "outside"):
        assert fragment in text


def test_empty_scenario_is_valid():
    assert validate_scenario(Scenario((), (), UNIT, Area(0, 0, 1, 1))) == []


def test_radius_assignment_rejects_negative():
    with pytest.raises(ValueError):
        RadiusAssignment((1.0, -0.1))


def test_radius_assignment_length_checked(fig1):
    with pytest.raises(ValueError):
        RadiusAssignment((1.0,)).check_for(fig1)


def test_json_round_trip(tmp_path, fig1):
    path = tmp_path / "s.json"
    dump_scenario(fig1, path)
    data = json.loads(path.read_text())
    assert set(data) == {"params", "area", "chargers", "nodes"}
    assert data["chargers"][0] == {"id": 0, "x": 1.0, "y": 0.0, "energy": 1.0}
    assert data["nodes"][1] == {"id": 1, "x": 2.0, "y": 0.0, "capacity": 1.0}
    assert load_scenario(path) == fig1


def test_loading_invalid_scenario_raises(fig1):
    data = scenario_to_dict(fig1)
    data["params"]["beta"] = 0
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(data)
    assert any("beta" in v for v in info.value.violations)


def test_loading_malformed_scenario_raises():
    with pytest.raises(ScenarioError):
        scenario_from_dict({"params": {}})


def test_solo_radius_cap():
    assert PhysicsParams(1, 1, 1, 2).solo_radius_cap == pytest.approx(math.sqrt(2))
    assert PhysicsParams(1, 1, 0.1, 0.2).solo_radius_cap == pytest.approx(math.sqrt(2))
    assert PhysicsParams(1, 1, 1, 0).solo_radius_cap == 0.0
