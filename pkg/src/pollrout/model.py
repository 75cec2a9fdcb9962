"""Domain types and the PRP cost model.

Units are SI throughout: meters, seconds, kilograms, m/s. Loads follow
delivery semantics: a vehicle leaves the depot carrying the demand of every
customer on its route and drops ``q_i`` at each visit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

TOL = 1e-6

FIXED = "fixed"
FREE = "free"
MODES = (FIXED, FREE)


class InputError(ValueError):
    """Raised for malformed instances, routes or schedules."""


@dataclass(frozen=True)
class PrpParameters:
    w1: float = 1.01763908e-3
    w2: float = 5.33605218e-5
    w3: float = 8.40323178e-9
    w4: float = 1.41223439e-7
    omega_fc: float = 1.4
    omega_fd: float = 2.22222222e-3
    v_min: float = 20.0 / 3.6
    v_max: float = 90.0 / 3.6
    capacity_q: float = 3650.0
    fleet_size_m: int = 10

    def __post_init__(self):
        for name in ("w1", "w4", "omega_fc", "omega_fd"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be strictly positive")
        for name in ("w2", "w3"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be non-negative")
        if not 0 < self.v_min <= self.v_max:
            raise InputError("need 0 < v_min <= v_max")
        if not self.capacity_q > 0:
            raise InputError("capacity_q must be positive")
        if self.fleet_size_m < 1:
            raise InputError("fleet_size_m must be >= 1")

    def clamp_speed(self, v: float) -> float:
        return min(max(v, self.v_min), self.v_max)


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    demand: float = 0.0
    tw_start: float = 0.0
    tw_end: float = math.inf
    service: float = 0.0

    def __post_init__(self):
        if self.tw_start > self.tw_end:
            raise InputError(f"node {self.id}: tw_start > tw_end")
        if self.demand < 0 or self.service < 0:
            raise InputError(f"node {self.id}: negative demand or service time")


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    nodes: tuple
    params: PrpParameters
    matrix: Optional[np.ndarray] = None
    dist: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if not nodes:
            raise InputError("instance has no depot")
        if [nd.id for nd in nodes] != list(range(len(nodes))):
            raise InputError("node ids must be 0..n in order")
        depot = nodes[0]
        if depot.demand != 0 or depot.service != 0:
            raise InputError("depot must have zero demand and service time")
        if self.matrix is not None:
            m = np.array(self.matrix, dtype=float)
            k = len(nodes)
            if m.shape != (k, k):
                raise InputError(f"distance matrix must be {k}x{k}, got {m.shape}")
            if (m < 0).any() or np.any(np.diag(m) != 0):
                raise InputError("distance matrix must be non-negative with zero diagonal")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
            object.__setattr__(self, "dist", m)
        else:
            xy = np.array([(nd.x, nd.y) for nd in nodes], dtype=float)
            diff = xy[:, None, :] - xy[None, :, :]
            d = np.sqrt((diff**2).sum(axis=-1))
            d.setflags(write=False)
            object.__setattr__(self, "dist", d)

    @property
    def n(self) -> int:
        """Number of customers."""
        return len(self.nodes) - 1

    @property
    def depot(self) -> Node:
        return self.nodes[0]

    def customers(self) -> range:
        return range(1, len(self.nodes))


@dataclass(frozen=True)
class Route:
    visits: tuple

    def __post_init__(self):
        v = tuple(int(i) for i in self.visits)
        object.__setattr__(self, "visits", v)
        if len(v) < 3:
            raise InputError("a route needs the depot, at least one customer and the depot")
        if v[0] != 0 or v[-1] != 0:
            raise InputError(f"route must start and end at the depot: {v}")
        inner = v[1:-1]
        if 0 in inner or len(set(inner)) != len(inner):
            raise InputError(f"route interior must be distinct customers: {v}")

    @classmethod
    def of(cls, customers: Iterable[int]) -> "Route":
        return cls((0, *customers, 0))

    @property
    def customers(self) -> tuple:
        return self.visits[1:-1]

    def __len__(self):
        return len(self.visits)


@dataclass(frozen=True)
class Schedule:
    """Arrival (service start) times, per-arc speeds and per-visit waits.

    ``waits[i]`` is the idle time spent at visit ``i`` before ``arrivals[i]``,
    so ``arrivals[i+1] = arrivals[i] + service_i + d_i / speeds[i] + waits[i+1]``.
    """

    arrivals: tuple
    speeds: tuple
    waits: tuple

    def __post_init__(self):
        if len(self.speeds) != len(self.arrivals) - 1 or len(self.waits) != len(self.arrivals):
            raise InputError("schedule arrays have inconsistent lengths")

    @property
    def departure(self) -> float:
        return self.arrivals[0]

    @property
    def end(self) -> float:
        return self.arrivals[-1]


@dataclass(frozen=True)
class Solution:
    """A set of routes; ``schedules`` is None for plans that were only priced
    by estimate (e.g. during local search)."""

    routes: tuple
    schedules: Optional[tuple]
    total_cost: float
    mode: str = FREE
    feasible: bool = True

    def __post_init__(self):
        object.__setattr__(self, "routes", tuple(self.routes))
        if self.schedules is not None:
            object.__setattr__(self, "schedules", tuple(self.schedules))
            if len(self.schedules) != len(self.routes):
                raise InputError("one schedule per route required")

    @property
    def n_routes(self) -> int:
        return len(self.routes)


def distance(instance: Instance, i: int, j: int) -> float:
    k = len(instance.nodes)
    if not (0 <= i < k and 0 <= j < k):
        raise InputError(f"vertex index out of range: ({i}, {j})")
    return float(instance.dist[i, j])


def route_loads(route: Route, instance: Instance) -> list:
    """Load on each arc of the route, delivery semantics."""
    q = [instance.nodes[v].demand for v in route.visits]
    loads = [0.0] * (len(q) - 1)
    acc = 0.0
    for k in range(len(q) - 2, -1, -1):
        acc += q[k + 1]
        loads[k] = acc
    return loads


def arc_load(route: Route, arc_index: int, instance: Instance) -> float:
    """Load on arc ``arc_index`` (1-based, from visit k to visit k+1)."""
    if not 1 <= arc_index <= len(route.visits) - 1:
        raise InputError(f"arc index {arc_index} out of range")
    return float(sum(instance.nodes[v].demand for v in route.visits[arc_index:]))


def arc_fuel(d: float, v: float, f: float, params: PrpParameters) -> float:
    """Fuel burnt on an arc of length ``d`` at speed ``v`` carrying ``f``."""
    if not v > 0:
        raise InputError("speed must be positive")
    return d * (params.w1 / v + params.w2 + params.w3 * f + params.w4 * v * v)


def route_fuel(route: Route, schedule: Schedule, instance: Instance) -> float:
    loads = route_loads(route, instance)
    vs = route.visits
    return sum(
        arc_fuel(float(instance.dist[vs[k], vs[k + 1]]), schedule.speeds[k], loads[k], instance.params)
        for k in range(len(vs) - 1)
    )


def route_cost(route: Route, schedule: Schedule, instance: Instance, mode: str = FREE) -> float:
    """Fuel plus driver cost. ``fixed`` charges the driver from time zero,
    ``free`` charges only from the actual depot departure."""
    if len(schedule.arrivals) != len(route.visits):
        raise InputError("schedule length does not match route")
    if mode not in MODES:
        raise InputError(f"unknown objective mode {mode!r}")
    p = instance.params
    duration = schedule.end if mode == FIXED else schedule.end - schedule.departure
    return p.omega_fc * route_fuel(route, schedule, instance) + p.omega_fd * duration


@dataclass(frozen=True)
class Violation:
    kind: str
    route: Optional[int]
    position: Optional[int]
    message: str

    def __str__(self):
        where = "" if self.route is None else f" route {self.route}"
        if self.position is not None:
            where += f" pos {self.position}"
        return f"[{self.kind}]{where}: {self.message}"


def validate_route(route: Route, schedule: Optional[Schedule], instance: Instance,
                   index: Optional[int] = None, tol: float = TOL) -> list:
    out = []
    p = instance.params
    vs = route.visits
    load = sum(instance.nodes[v].demand for v in vs)
    if load > p.capacity_q + tol:
        out.append(Violation("capacity", index, None, f"load {load:g} > {p.capacity_q:g}"))
    if schedule is None:
        out.append(Violation("schedule", index, None, "route has no schedule"))
        return out
    if len(schedule.arrivals) != len(vs):
        out.append(Violation("schedule", index, None, "schedule length mismatch"))
        return out
    if abs(schedule.waits[0]) > tol:
        out.append(Violation("schedule", index, 0, "wait before departure must be zero"))
    for i, v in enumerate(vs):
        nd = instance.nodes[v]
        t = schedule.arrivals[i]
        if t < nd.tw_start - tol or t > nd.tw_end + tol:
            out.append(Violation("time_window", index, i,
                                 f"t={t:.6f} outside [{nd.tw_start:g}, {nd.tw_end:g}] at node {v}"))
        if schedule.waits[i] < -tol:
            out.append(Violation("schedule", index, i, "negative wait"))
    for k in range(len(vs) - 1):
        v = schedule.speeds[k]
        if v < p.v_min - tol or v > p.v_max + tol:
            out.append(Violation("speed", index, k, f"speed {v:.6f} outside [{p.v_min:g}, {p.v_max:g}]"))
        if v <= 0:
            continue
        i, j = vs[k], vs[k + 1]
        expect = (schedule.arrivals[k] + instance.nodes[i].service + instance.dist[i, j] / v
                  + schedule.waits[k + 1])
        if abs(expect - schedule.arrivals[k + 1]) > tol:
            out.append(Violation("consistency", index, k + 1,
                                 f"arrival {schedule.arrivals[k + 1]:.6f} != {expect:.6f}"))
    return out


def validate(solution: Solution, instance: Instance, tol: float = TOL) -> list:
    """Every constraint violation of ``solution``; an empty list means feasible."""
    out = []
    p = instance.params
    seen = {}
    for r, route in enumerate(solution.routes):
        for c in route.customers:
            if c < 1 or c > instance.n:
                out.append(Violation("coverage", r, None, f"unknown customer {c}"))
            elif c in seen:
                out.append(Violation("coverage", r, None, f"customer {c} also on route {seen[c]}"))
            else:
                seen[c] = r
    missing = [c for c in instance.customers() if c not in seen]
    if missing:
        out.append(Violation("coverage", None, None, f"unvisited customers {missing}"))
    if solution.n_routes > p.fleet_size_m:
        out.append(Violation("fleet", None, None, f"{solution.n_routes} routes > {p.fleet_size_m}"))
    scheds = solution.schedules or (None,) * solution.n_routes
    total = 0.0
    for r, (route, sched) in enumerate(zip(solution.routes, scheds)):
        out.extend(validate_route(route, sched, instance, r, tol))
        if sched is not None and len(sched.arrivals) == len(route.visits):
            total += route_cost(route, sched, instance, solution.mode)
    if solution.schedules is not None and abs(total - solution.total_cost) > tol:
        out.append(Violation("cost", None, None,
                             f"total_cost {solution.total_cost:.6f} != recomputed {total:.6f}"))
    return out


def solution_from_schedules(routes: Sequence[Route], schedules: Sequence[Schedule],
                            instance: Instance, mode: str = FREE) -> Solution:
    total = sum(route_cost(r, s, instance, mode) for r, s in zip(routes, schedules))
    return Solution(tuple(routes), tuple(schedules), total, mode)
