import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pollrout.model import InputError, PrpParameters, Route
from pollrout.oracle import (OracleConfig, departure_scan, epsilon, lattice, lipschitz, oracle_dp,
                             verify_route)
from pollrout.sdtoa import sdtoa

from conftest import line_instance
from strategies import feasible_routes


def test_lattice_includes_both_ends():
    pts = lattice(10.0, 13.5, 1.0)
    assert list(pts) == [10.0, 11.0, 12.0, 13.0, 13.5]
    assert list(lattice(4.0, 4.0, 1.0)) == [4.0]


def test_epsilon_scales_linearly(params):
    assert epsilon(5, params, 2.0) == pytest.approx(2 * epsilon(5, params, 1.0))
    assert epsilon(1, params, 1.0) == 0.0
    assert lipschitz(params) > params.omega_fd


def test_config_validation():
    with pytest.raises(InputError):
        OracleConfig(delta=0)
    with pytest.raises(InputError):
        OracleConfig(method="magic")


def test_lattice_size_guard(tiny, tiny_route):
    with pytest.raises(InputError):
        oracle_dp(tiny_route, tiny, OracleConfig(delta=1e-3, max_points=1000))


def test_oracle_on_hand_route():
    inst = line_instance([10_000], [(5000, 6000)])
    route = Route.of([1])
    dp = oracle_dp(route, inst)
    res = sdtoa(route, inst)
    assert dp.feasible and abs(dp.cost - res.cost) <= epsilon(len(route), inst.params, 1.0)
    assert dp.arrivals[0] == dp.departure


def test_oracle_infeasible():
    inst = line_instance([100_000], [(0, 1000)])
    assert not oracle_dp(Route.of([1]), inst).feasible
    assert not departure_scan(Route.of([1]), inst, 50).feasible


def test_scan_grid_guard(tiny, tiny_route):
    with pytest.raises(InputError):
        departure_scan(tiny_route, tiny, 1)


@settings(max_examples=25)
@given(feasible_routes(k_max=4))
def test_dense_and_monotone_agree(case):
    inst, route = case
    cfg_m = OracleConfig(delta=20.0)
    cfg_d = OracleConfig(delta=20.0, method="dense")
    a, b = oracle_dp(route, inst, cfg_m), oracle_dp(route, inst, cfg_d)
    assert a.cost == pytest.approx(b.cost, rel=1e-12)


@settings(max_examples=25)
@given(feasible_routes(k_max=5))
def test_sdtoa_within_lattice_error(case):
    inst, route = case
    res = sdtoa(route, inst)
    for delta in (8.0, 4.0):
        dp = oracle_dp(route, inst, OracleConfig(delta=delta))
        # the lattice optimum is an upper bound on the continuous one
        assert res.cost <= dp.cost + 1e-7
        assert dp.cost - res.cost <= epsilon(len(route), inst.params, delta)


@settings(max_examples=20)
@given(feasible_routes(k_max=4), st.sampled_from([16.0, 10.0, 6.0]))
def test_halving_delta_never_hurts(case, delta):
    inst, route = case
    coarse = oracle_dp(route, inst, OracleConfig(delta=delta))
    fine = oracle_dp(route, inst, OracleConfig(delta=delta / 2))
    assert fine.cost <= coarse.cost + 1e-9


@settings(max_examples=20)
@given(feasible_routes(k_max=6))
def test_verify_route_passes(case):
    inst, route = case
    rep = verify_route(route, inst, delta=5.0, grid=500)
    assert rep.passed, rep.lines()
    assert rep.scan_cost >= rep.sdtoa_cost - 1e-7
