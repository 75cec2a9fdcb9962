import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pollrout.model import (FIXED, FREE, InputError, Instance, Node, PrpParameters, Route,
                            Schedule, Solution, arc_fuel, arc_load, distance, route_cost,
                            route_loads, solution_from_schedules, validate)
from pollrout.sdtoa import sdtoa

from conftest import line_instance

# frozen from an independent evaluation of d*(w1/v + w2 + w3 f + w4 v^2)
FUEL_10KM_20MS = 1.607318514


def test_arc_fuel_reference_value(params):
    assert arc_fuel(10_000, 20.0, 0.0, params) == pytest.approx(FUEL_10KM_20MS, rel=1e-9)


def test_arc_fuel_load_term_is_linear(params):
    base = arc_fuel(5000, 15.0, 0.0, params)
    loaded = arc_fuel(5000, 15.0, 1000.0, params)
    assert loaded - base == pytest.approx(5000 * params.w3 * 1000.0)


def test_arc_fuel_rejects_nonpositive_speed(params):
    with pytest.raises(InputError):
        arc_fuel(100, 0.0, 0.0, params)


@given(st.floats(1.0, 1e5), st.floats(0.0, 5000.0))
def test_fuel_per_meter_is_convex_in_speed(d, f):
    p = PrpParameters()
    vs = np.linspace(p.v_min, p.v_max, 50)
    vals = np.array([arc_fuel(d, v, f, p) for v in vs])
    assert np.all(np.diff(vals, 2) >= -1e-9 * vals.max())


def test_params_validation():
    with pytest.raises(InputError):
        PrpParameters(v_min=30, v_max=20)
    with pytest.raises(InputError):
        PrpParameters(w1=0.0)
    with pytest.raises(InputError):
        PrpParameters(capacity_q=0)
    with pytest.raises(InputError):
        PrpParameters(fleet_size_m=0)


def test_node_and_route_validation():
    with pytest.raises(InputError):
        Node(1, 0, 0, 10, 100, 50)
    with pytest.raises(InputError):
        Node(1, 0, 0, -1)
    for bad in [(0, 0), (1, 2, 0), (0, 1, 1, 0), (0, 1, 0, 2, 0)]:
        with pytest.raises(InputError):
            Route(bad)


def test_instance_rejects_bad_depot_and_matrix():
    with pytest.raises(InputError):
        Instance("x", (Node(0, 0, 0, demand=5.0),), PrpParameters())
    nodes = (Node(0, 0, 0), Node(1, 1, 1, 10))
    with pytest.raises(InputError):
        Instance("x", nodes, PrpParameters(), matrix=np.ones((2, 2)))
    with pytest.raises(InputError):
        Instance("x", nodes, PrpParameters(), matrix=np.zeros((3, 3)))


def test_distance_matrix_overrides_coordinates():
    nodes = (Node(0, 0, 0), Node(1, 3, 4, 10))
    inst = Instance("m", nodes, PrpParameters(), matrix=[[0, 7], [9, 0]])
    assert distance(inst, 0, 1) == 7 and distance(inst, 1, 0) == 9
    assert distance(Instance("e", nodes, PrpParameters()), 0, 1) == 5
    with pytest.raises(InputError):
        distance(inst, 0, 2)


def test_loads_follow_delivery(tiny, tiny_route):
    assert route_loads(tiny_route, tiny) == [200.0, 100.0, 0.0]
    assert [arc_load(tiny_route, k, tiny) for k in (1, 2, 3)] == [200.0, 100.0, 0.0]
    with pytest.raises(InputError):
        arc_load(tiny_route, 4, tiny)


def test_route_cost_modes_differ_by_departure(tiny, tiny_route):
    sched = sdtoa(tiny_route, tiny).schedule
    shifted = Schedule(tuple(t + 500 for t in sched.arrivals), sched.speeds, sched.waits)
    p = tiny.params
    assert route_cost(tiny_route, shifted, tiny, FREE) == pytest.approx(
        route_cost(tiny_route, sched, tiny, FREE))
    assert route_cost(tiny_route, shifted, tiny, FIXED) - route_cost(tiny_route, shifted, tiny, FREE) == \
        pytest.approx(p.omega_fd * shifted.departure)


def test_validate_accepts_optimized_solution(tiny, tiny_route):
    res = sdtoa(tiny_route, tiny)
    sol = solution_from_schedules([tiny_route], [res.schedule], tiny)
    assert validate(sol, tiny) == []


def test_validate_reports_each_kind():
    inst = line_instance([10_000, 20_000], [(0, 100), (0, math.inf)],
                         demands=[3000.0, 3000.0])
    route = Route.of([1, 2])
    sched = Schedule((0.0, 900.0, 1000.0, 2000.0), (30.0, 20.0, 20.0), (0.0, 0.0, 0.0, 5.0))
    sol = Solution((route,), (sched,), 1.0)
    kinds = {v.kind for v in validate(sol, inst)}
    assert {"capacity", "time_window", "speed", "consistency", "cost"} <= kinds


def test_validate_coverage_and_fleet(tiny):
    p = PrpParameters(fleet_size_m=1)
    inst = Instance("f", tiny.nodes, p)
    sol = Solution((Route.of([1]), Route.of([1])), None, 0.0)
    kinds = [v.kind for v in validate(sol, inst)]
    assert kinds.count("coverage") == 2
    assert "fleet" in kinds and "schedule" in kinds
