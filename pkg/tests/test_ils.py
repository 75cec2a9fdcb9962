import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pollrout.generate import gen_instance
from pollrout.ils import (IlsConfig, Pricer, SpeedMatrix, construct, ils_run, local_search,
                          optimize_schedules, perturb, update_speed_matrix)
from pollrout.model import FIXED, FREE, Route, validate
from pollrout.sdtoa import v_star_fuel_driver

from strategies import arbitrary_routes, top_speed_feasible


def test_config_validation():
    with pytest.raises(ValueError):
        IlsConfig(iterations=-1)
    with pytest.raises(ValueError):
        IlsConfig(neighborhoods=("teleport",))


@given(arbitrary_routes(k_max=6))
def test_pricer_feasibility_is_exact(case):
    inst, route = case
    pricer = Pricer(inst, SpeedMatrix.fresh(inst))
    assert pricer.feasible(route.customers) == top_speed_feasible(route, inst)
    assert math.isfinite(pricer.cost(route.customers)) == pricer.feasible(route.customers)


def test_speed_matrix_update_tracks_schedules():
    inst = gen_instance(5, "A", 3)
    sol = ils_run(inst, IlsConfig(iterations=2, restarts=1)).best
    fresh = SpeedMatrix.fresh(inst)
    upd = update_speed_matrix(fresh, sol, inst, decay=0.5)
    route, sched = sol.routes[0], sol.schedules[0]
    i, j = route.visits[0], route.visits[1]
    assert upd.speeds[i, j] == pytest.approx(sched.speeds[0])
    assert np.all(fresh.speeds == v_star_fuel_driver(inst.params))


@pytest.mark.parametrize("cls", "ABC")
def test_construct_and_descend_stay_feasible(cls):
    inst = gen_instance(12, cls, 5)
    rng = np.random.default_rng(0)
    speeds = SpeedMatrix.fresh(inst)
    start = construct(inst, rng, speeds)
    assert start.feasible
    assert sorted(c for r in start.routes for c in r.customers) == list(range(1, 13))
    opt = local_search(start, inst, speeds, rng)
    assert opt.total_cost <= start.total_cost + 1e-9
    sched = optimize_schedules(opt, inst, speeds)
    assert sched is not None and validate(sched, inst) == []
    kicked = perturb(opt, inst, 3, rng, speeds)
    assert sorted(c for r in kicked.routes for c in r.customers) == list(range(1, 13))


@pytest.mark.parametrize("mode", [FREE, FIXED])
def test_run_produces_valid_best_and_pool(mode):
    inst = gen_instance(10, "B", 11)
    res = ils_run(inst, IlsConfig(iterations=8, restarts=2, mode=mode))
    assert res.best is not None and validate(res.best, inst) == []
    assert res.best.mode == mode
    assert len(res.pool) >= len(res.best.routes)
    bests = [e["best"] for e in res.log]
    assert all(b2 <= b1 for b1, b2 in zip(bests, bests[1:]))
    assert all(e["current"] >= e["best"] - 1e-9 for e in res.log)


@settings(max_examples=5)
@given(st.integers(0, 1000))
def test_same_seed_same_run(seed):
    inst = gen_instance(8, "C", 2)
    cfg = IlsConfig(iterations=5, restarts=2, seed=seed)
    a, b = ils_run(inst, cfg), ils_run(inst, cfg)
    assert a.best == b.best and a.log == b.log
    assert sorted(a.pool.entries(), key=lambda e: e.mask) == sorted(b.pool.entries(), key=lambda e: e.mask)


def test_time_limit_is_honoured():
    inst = gen_instance(10, "A", 0)
    res = ils_run(inst, IlsConfig(iterations=10_000, restarts=1, time_limit=0.2))
    assert res.timed_out and res.best is not None
