"""Route pool and exact set-partitioning recombination.

Routes are keyed by their customer set: only the cheapest visit order of a
given set is worth keeping, since any partition using the set can use that
order instead.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

from .model import FREE, Instance, Route, Solution
from .sdtoa import optimize_route

POOL_CAPACITY = 10_000
_TOL = 1e-6


@dataclass(frozen=True)
class PoolEntry:
    mask: int
    visits: tuple
    cost: float

    @property
    def customers(self) -> tuple:
        return self.visits[1:-1]


def customer_mask(customers: Iterable[int]) -> int:
    m = 0
    for c in customers:
        m |= 1 << (c - 1)
    return m


class RoutePool:
    """Thread-safe pool of feasible routes with their optimized costs."""

    def __init__(self, capacity: int = POOL_CAPACITY, mode: str = FREE):
        self.capacity = capacity
        self.mode = mode
        self._entries: dict = {}
        self._lock = threading.Lock()

    def add(self, route: Route, cost: float) -> bool:
        mask = customer_mask(route.customers)
        with self._lock:
            old = self._entries.get(mask)
            if old is not None and cost >= old.cost - _TOL:
                return False
            self._entries[mask] = PoolEntry(mask, route.visits, float(cost))
            if len(self._entries) > self.capacity:
                worst = max(self._entries.values(), key=lambda e: e.cost)
                del self._entries[worst.mask]
                return worst.mask != mask
            return True

    def add_entry(self, entry: PoolEntry) -> bool:
        return self.add(Route(entry.visits), entry.cost)

    def merge(self, other: "RoutePool") -> int:
        return sum(self.add_entry(e) for e in other.entries())

    def entries(self) -> list:
        with self._lock:
            return list(self._entries.values())

    def __len__(self):
        return len(self._entries)

    def __contains__(self, route: Route) -> bool:
        e = self._entries.get(customer_mask(route.customers))
        return e is not None and e.visits == route.visits


@dataclass(frozen=True)
class CoverResult:
    chosen: tuple  # indices into the column list
    cost: float
    optimal: bool


def _popcount(x: int) -> int:
    return bin(x).count("1")


def solve_cover(columns: list, n: int, max_routes: int,
                time_limit: Optional[float] = None) -> Optional[CoverResult]:
    """Minimum-cost exact cover of customers ``1..n`` by ``columns``.

    ``columns`` is a list of ``(mask, cost)``. Depth-first branch-and-bound:
    branch on the uncovered customer with the fewest usable columns, bound by
    splitting every column's cost evenly over its customers.
    """
    full = (1 << n) - 1
    deadline = math.inf if time_limit is None else time.perf_counter() + time_limit
    cols = sorted(range(len(columns)), key=lambda k: (columns[k][1], k))
    cols = [k for k in cols if columns[k][0] and not columns[k][0] & ~full]
    share = {k: columns[k][1] / _popcount(columns[k][0]) for k in cols}
    by_cust = [[k for k in cols if columns[k][0] >> c & 1] for c in range(n)]

    best_cost = math.inf
    best_pick: tuple = ()

    # greedy incumbent: cheapest cost-per-customer column that still fits
    left, pick, cost = full, [], 0.0
    while left and len(pick) < max_routes:
        fit = [k for k in cols if not columns[k][0] & ~left]
        if not fit:
            break
        k = min(fit, key=lambda k: (share[k], k))
        pick.append(k)
        cost += columns[k][1]
        left &= ~columns[k][0]
    if not left:
        best_cost, best_pick = cost, tuple(pick)

    timed_out = False
    nodes = 0

    def dfs(left: int, used: int, cost: float, chosen: list):
        nonlocal best_cost, best_pick, timed_out, nodes
        if not left:
            if cost < best_cost - 1e-12:
                best_cost, best_pick = cost, tuple(chosen)
            return
        if used >= max_routes or timed_out:
            return
        nodes += 1
        if nodes & 255 == 0 and time.perf_counter() > deadline:
            timed_out = True
            return
        bound = 0.0
        branch_cols = None
        c, rest = 0, left
        while rest:
            if rest & 1:
                usable = [k for k in by_cust[c] if not columns[k][0] & ~left]
                if not usable:
                    return
                bound += min(share[k] for k in usable)
                if branch_cols is None or len(usable) < len(branch_cols):
                    branch_cols = usable
            rest >>= 1
            c += 1
        if cost + bound >= best_cost - 1e-12:
            return
        for k in branch_cols:
            if cost + columns[k][1] >= best_cost - 1e-12:
                break
            chosen.append(k)
            dfs(left & ~columns[k][0], used + 1, cost + columns[k][1], chosen)
            chosen.pop()

    if n == 0:
        return CoverResult((), 0.0, True)
    dfs(full, 0, 0.0, [])
    if not math.isfinite(best_cost):
        return None
    return CoverResult(tuple(sorted(best_pick)), best_cost, not timed_out)


@dataclass(frozen=True)
class SpOutcome:
    solution: Solution
    optimal: bool


def solve_sp(pool: RoutePool, instance: Instance,
             time_limit: Optional[float] = None) -> Optional[SpOutcome]:
    """Best partition of the customers into pooled routes, rescheduled.

    None when no partition exists or none was found within the time limit;
    ``optimal`` is False when the search was cut short.
    """
    entries = pool.entries()
    if not entries:
        return None
    res = solve_cover([(e.mask, e.cost) for e in entries], instance.n,
                      instance.params.fleet_size_m, time_limit)
    if res is None:
        return None
    routes, scheds, total = [], [], 0.0
    for k in res.chosen:
        route = Route(entries[k].visits)
        out = optimize_route(route, instance, pool.mode)
        if not out.feasible:
            return None
        routes.append(route)
        scheds.append(out.schedule)
        total += out.cost
    return SpOutcome(Solution(tuple(routes), tuple(scheds), total, pool.mode), res.optimal)


def export_sp(pool: RoutePool, instance: Instance, out: TextIO) -> None:
    """Write the pool as a set-partitioning instance for external solvers.

    Header ``n m``; then one line per column: ``cost c1 c2 ...``.
    """
    out.write(f"{instance.n} {instance.params.fleet_size_m}\n")
    for e in pool.entries():
        out.write(repr(e.cost) + " " + " ".join(str(c) for c in e.customers) + "\n")
