import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pollrout.generate import gen_instance
from pollrout.ils import IlsConfig, ils_run
from pollrout.model import FIXED, Route, validate
from pollrout.setpart import RoutePool, customer_mask, export_sp, solve_cover, solve_sp

from cover_oracle import brute_force_cover


def random_columns(rng, n, size):
    cols = []
    # plant one partition so a cover usually exists
    perm = rng.permutation(np.arange(1, n + 1))
    for chunk in np.array_split(perm, rng.integers(1, n + 1)):
        if len(chunk):
            cols.append((customer_mask(chunk), float(rng.uniform(10, 100))))
    while len(cols) < size:
        k = int(rng.integers(1, n + 1))
        custs = rng.choice(np.arange(1, n + 1), size=k, replace=False)
        cols.append((customer_mask(custs), float(rng.uniform(5, 100) * k ** 0.7)))
    return cols[:size]


def test_customer_mask():
    assert customer_mask([1, 3]) == 0b101
    assert customer_mask([]) == 0


def test_cover_trivial_cases():
    assert solve_cover([], 0, 1).cost == 0.0
    assert solve_cover([(0b01, 1.0)], 2, 5) is None
    res = solve_cover([(0b11, 5.0), (0b01, 1.0), (0b10, 1.0)], 2, 5)
    assert res.cost == 2.0 and res.chosen == (1, 2) and res.optimal
    # fleet limit forces the pricier single route
    assert solve_cover([(0b11, 5.0), (0b01, 1.0), (0b10, 1.0)], 2, 1).cost == 5.0


def test_cover_is_partition_not_covering():
    # overlapping cheap columns must not be combined
    cols = [(0b011, 1.0), (0b110, 1.0), (0b001, 10.0), (0b100, 10.0), (0b010, 10.0)]
    assert solve_cover(cols, 3, 5).cost == 11.0


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9), st.integers(1, 20), st.integers(1, 6))
def test_cover_matches_brute_force(seed, n, size, fleet):
    cols = random_columns(np.random.default_rng(seed), n, size)
    res = solve_cover(cols, n, fleet)
    ref = brute_force_cover(cols, n, fleet)
    if ref is None:
        assert res is None
    else:
        assert res is not None and res.optimal
        assert res.cost == pytest.approx(ref, abs=1e-9)
        chosen = [cols[k][0] for k in res.chosen]
        assert sum(bin(m).count("1") for m in chosen) == n
        assert len(res.chosen) <= fleet


def test_pool_keeps_cheapest_order_per_set():
    pool = RoutePool()
    assert pool.add(Route.of([1, 2]), 10.0)
    assert not pool.add(Route.of([2, 1]), 10.5)
    assert pool.add(Route.of([2, 1]), 9.0)
    assert len(pool) == 1 and Route.of([2, 1]) in pool and Route.of([1, 2]) not in pool


def test_pool_evicts_worst_over_capacity():
    pool = RoutePool(capacity=2)
    pool.add(Route.of([1]), 5.0)
    pool.add(Route.of([2]), 1.0)
    assert not pool.add(Route.of([3]), 9.0)
    assert pool.add(Route.of([4]), 2.0)
    assert sorted(e.cost for e in pool.entries()) == [1.0, 2.0]


def test_pool_merge():
    a, b = RoutePool(), RoutePool()
    a.add(Route.of([1]), 3.0)
    b.add(Route.of([1]), 2.0)
    b.add(Route.of([2]), 2.0)
    assert a.merge(b) == 2 and len(a) == 2


def test_export_format():
    inst = gen_instance(3, "A", 0)
    pool = RoutePool()
    pool.add(Route.of([1, 3]), 12.5)
    buf = io.StringIO()
    export_sp(pool, inst, buf)
    assert buf.getvalue().splitlines() == [f"3 {inst.params.fleet_size_m}", "12.5 1 3"]


@pytest.mark.parametrize("cls,mode", [("A", "free"), ("C", "free"), ("B", FIXED)])
def test_sp_never_worse_than_incumbent(cls, mode):
    inst = gen_instance(8, cls, 7)
    res = ils_run(inst, IlsConfig(iterations=10, restarts=2, mode=mode))
    sp = solve_sp(res.pool, inst)
    assert sp is not None and sp.optimal
    assert sp.solution.total_cost <= res.best.total_cost + 1e-6
    assert validate(sp.solution, inst) == []


def test_sp_empty_pool():
    assert solve_sp(RoutePool(), gen_instance(2, "A", 0)) is None
