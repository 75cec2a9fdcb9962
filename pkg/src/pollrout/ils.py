"""Iterated local search producing routes for the pool.

Moves are priced with a speed matrix (per-arc speed estimates carried over
from earlier exact schedules). Exact speed/departure optimization only runs
on local optima; its speeds then feed back into the matrix.

Route feasibility during the search is exact: with waiting allowed, a visit
order is schedulable iff the earliest-start forward pass at top speed meets
every window.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import FIXED, FREE, Instance, Route, Solution, route_cost, solution_from_schedules
from .sdtoa import optimize_route, v_star_fuel_driver
from .setpart import RoutePool

NEIGHBORHOODS = ("relocate", "swap", "two_opt", "two_opt_star", "or_opt")
_IMPROVE = 1e-9


@dataclass(frozen=True)
class IlsConfig:
    iterations: int = 40
    restarts: int = 5
    perturbation: int = 3
    neighborhoods: tuple = NEIGHBORHOODS
    seed: int = 0
    time_limit: float = math.inf
    mode: str = FREE
    decay: float = 0.5

    def __post_init__(self):
        if min(self.iterations, self.restarts, self.perturbation) < 0:
            raise ValueError("iteration counts must be non-negative")
        unknown = set(self.neighborhoods) - set(NEIGHBORHOODS)
        if unknown:
            raise ValueError(f"unknown neighborhoods {sorted(unknown)}")


@dataclass(frozen=True, eq=False)
class SpeedMatrix:
    speeds: np.ndarray

    @classmethod
    def fresh(cls, instance: Instance) -> "SpeedMatrix":
        k = len(instance.nodes)
        return cls(np.full((k, k), v_star_fuel_driver(instance.params)))


def update_speed_matrix(speeds: SpeedMatrix, solution: Solution, instance: Instance,
                        decay: float = 0.5) -> SpeedMatrix:
    """Traversed arcs take the scheduled speed; all others relax toward the
    fuel-and-driver optimum by ``decay``."""
    target = v_star_fuel_driver(instance.params)
    new = target + decay * (speeds.speeds - target)
    for route, sched in zip(solution.routes, solution.schedules or ()):
        vs = route.visits
        for k in range(len(vs) - 1):
            new[vs[k], vs[k + 1]] = sched.speeds[k]
    return SpeedMatrix(new)


class Pricer:
    """Estimated route costs under a speed matrix, memoized per customer tuple."""

    def __init__(self, instance: Instance, speeds: SpeedMatrix, mode: str = FREE):
        p = instance.params
        self.mode = mode
        self.params = p
        nodes = instance.nodes
        d = instance.dist
        v = speeds.speeds
        self.q = [nd.demand for nd in nodes]
        self.a = [nd.tw_start for nd in nodes]
        self.b = [nd.tw_end for nd in nodes]
        self.tau = [nd.service for nd in nodes]
        self.t_fast = (d / p.v_max).tolist()
        self.t_est = (d / v).tolist()
        self.base = (d * (p.w1 / v + p.w2 + p.w4 * v * v)).tolist()
        self.w3d = (p.w3 * d).tolist()
        self._cache: dict = {}

    def feasible(self, custs: tuple) -> bool:
        if sum(self.q[c] for c in custs) > self.params.capacity_q + 1e-9:
            return False
        a, b, tau, tt = self.a, self.b, self.tau, self.t_fast
        t = a[0]
        prev = 0
        for c in custs + (0,):
            t = max(a[c], t + tau[prev] + tt[prev][c])
            if t > b[c] + 1e-9:
                return False
            prev = c
        return True

    def cost(self, custs: tuple) -> float:
        """Estimated cost, ``inf`` when the visit order cannot be scheduled."""
        if not custs:
            return 0.0
        hit = self._cache.get(custs)
        if hit is not None:
            return hit
        if not self.feasible(custs):
            self._cache[custs] = math.inf
            return math.inf
        a, b, tau, tt = self.a, self.b, self.tau, self.t_est
        load = sum(self.q[c] for c in custs)
        t = a[0]
        fuel = 0.0
        wait = 0.0
        slack = math.inf
        prev = 0
        for c in custs + (0,):
            fuel += self.base[prev][c] + self.w3d[prev][c] * load
            load -= self.q[c]
            t = t + tau[prev] + tt[prev][c]
            if t < a[c]:
                wait += a[c] - t
                t = a[c]
            elif t > b[c]:
                t = b[c]  # the exact schedule will have to speed up
            slack = min(slack, wait + b[c] - t)
            prev = c
        p = self.params
        if self.mode == FIXED:
            driver = t
        else:
            delay = min(wait, slack, b[0] - a[0])
            driver = t - a[0] - delay
        val = p.omega_fc * fuel + p.omega_fd * driver
        self._cache[custs] = val
        return val

    def total(self, plan: list) -> float:
        return sum(self.cost(r) for r in plan)


def _plan(solution: Solution) -> list:
    return [tuple(r.customers) for r in solution.routes]


def _unscheduled(plan: list, pricer: Pricer, mode: str, feasible: bool = True) -> Solution:
    plan = [r for r in plan if r]
    return Solution(tuple(Route.of(r) for r in plan), None, pricer.total(plan), mode, feasible)


def _best_insertion(c: int, plan: list, pricer: Pricer):
    best = (math.inf, None, None)
    for r, route in enumerate(plan):
        old = pricer.cost(route)
        for pos in range(len(route) + 1):
            new = route[:pos] + (c,) + route[pos:]
            delta = pricer.cost(new) - old
            if delta < best[0]:
                best = (delta, r, pos)
    return best


def construct(instance: Instance, rng: np.random.Generator, speeds: Optional[SpeedMatrix] = None,
              mode: str = FREE) -> Solution:
    """Insert customers in random order at their cheapest feasible position,
    opening a new route when none exists."""
    speeds = speeds or SpeedMatrix.fresh(instance)
    pricer = Pricer(instance, speeds, mode)
    order = [int(c) for c in rng.permutation(np.arange(1, instance.n + 1))]
    plan: list = []
    ok = True
    for c in order:
        delta, r, pos = _best_insertion(c, plan, pricer)
        if r is not None and math.isfinite(delta):
            plan[r] = plan[r][:pos] + (c,) + plan[r][pos:]
        elif len(plan) < instance.params.fleet_size_m and pricer.feasible((c,)):
            plan.append((c,))
        else:
            ok = False
    return _unscheduled(plan, pricer, mode, ok)


def _moves(plan: list, hoods: tuple):
    """Yield candidate plans as (route indices, new routes)."""
    R = len(plan)
    if "relocate" in hoods or "or_opt" in hoods:
        lengths = ([1] if "relocate" in hoods else []) + ([2, 3] if "or_opt" in hoods else [])
        for r1 in range(R):
            src = plan[r1]
            for L in lengths:
                for i in range(len(src) - L + 1):
                    seg = src[i:i + L]
                    rest = src[:i] + src[i + L:]
                    for r2 in range(R):
                        if r2 == r1:
                            for j in range(len(rest) + 1):
                                if j != i:
                                    yield (r1,), (rest[:j] + seg + rest[j:],)
                        else:
                            dst = plan[r2]
                            for j in range(len(dst) + 1):
                                yield (r1, r2), (rest, dst[:j] + seg + dst[j:])
    if "swap" in hoods:
        for r1 in range(R):
            for r2 in range(r1, R):
                A, B = plan[r1], plan[r2]
                for i in range(len(A)):
                    for j in range(i + 1 if r1 == r2 else 0, len(B)):
                        if r1 == r2:
                            new = list(A)
                            new[i], new[j] = new[j], new[i]
                            yield (r1,), (tuple(new),)
                        else:
                            yield (r1, r2), (A[:i] + (B[j],) + A[i + 1:], B[:j] + (A[i],) + B[j + 1:])
    if "two_opt" in hoods:
        for r in range(R):
            A = plan[r]
            for i in range(len(A) - 1):
                for j in range(i + 1, len(A)):
                    yield (r,), (A[:i] + A[i:j + 1][::-1] + A[j + 1:],)
    if "two_opt_star" in hoods:
        for r1 in range(R):
            for r2 in range(r1 + 1, R):
                A, B = plan[r1], plan[r2]
                for i in range(len(A) + 1):
                    for j in range(len(B) + 1):
                        if (i, j) in ((0, 0), (len(A), len(B))):
                            continue
                        yield (r1, r2), (A[:i] + B[j:], B[:j] + A[i:])


def local_search(solution: Solution, instance: Instance, speeds: SpeedMatrix,
                 rng: Optional[np.random.Generator] = None,
                 neighborhoods: tuple = NEIGHBORHOODS) -> Solution:
    """Best-improvement descent; returns an unscheduled local optimum."""
    mode = solution.mode
    pricer = Pricer(instance, speeds, mode)
    plan = [r for r in _plan(solution) if r]
    while True:
        best_delta, best_move = -_IMPROVE, None
        cur = [pricer.cost(r) for r in plan]
        cost = pricer.cost
        for idx, new in _moves(plan, neighborhoods):
            if len(idx) == 1:
                delta = cost(new[0]) - cur[idx[0]]
            else:
                delta = cost(new[0]) + cost(new[1]) - cur[idx[0]] - cur[idx[1]]
            if delta < best_delta:
                best_delta, best_move = delta, (idx, new)
        if best_move is None:
            break
        idx, new = best_move
        for r, route in zip(idx, new):
            plan[r] = route
        plan = [r for r in plan if r]
    return _unscheduled(plan, pricer, mode, solution.feasible)


def _eject_position(route: Route, position: int) -> int:
    pos = min(max(position, 1), len(route.visits) - 2)
    return route.visits[pos]


def optimize_schedules(solution: Solution, instance: Instance,
                       speeds: Optional[SpeedMatrix] = None) -> Optional[Solution]:
    """Exact speeds and departures for every route.

    A route the optimizer rejects loses the customer at its worst violation,
    which is reinserted at its cheapest feasible position; if that still does
    not schedule, None is returned and the caller drops the solution.
    """
    mode = solution.mode
    if not solution.routes:
        return Solution((), (), 0.0, mode, solution.feasible)
    plan = _plan(solution)
    results = [optimize_route(Route.of(r), instance, mode) for r in plan]
    bad = [k for k, res in enumerate(results) if not res.feasible]
    if bad:
        pricer = Pricer(instance, speeds or SpeedMatrix.fresh(instance), mode)
        for k in bad:
            c = _eject_position(Route.of(plan[k]), results[k].position or 1)
            plan[k] = tuple(x for x in plan[k] if x != c)
            delta, r, pos = _best_insertion(c, [p if i != k else () for i, p in enumerate(plan)], pricer)
            if r is not None and math.isfinite(delta):
                plan[r] = plan[r][:pos] + (c,) + plan[r][pos:]
            elif len([p for p in plan if p]) < instance.params.fleet_size_m:
                plan.append((c,))
            else:
                return None
        plan = [r for r in plan if r]
        results = [optimize_route(Route.of(r), instance, mode) for r in plan]
        if not all(res.feasible for res in results):
            return None
    routes = [Route.of(r) for r in plan]
    sol = solution_from_schedules(routes, [res.schedule for res in results], instance, mode)
    if not solution.feasible:
        return Solution(sol.routes, sol.schedules, sol.total_cost, mode, False)
    return sol


def perturb(solution: Solution, instance: Instance, strength: int, rng: np.random.Generator,
            speeds: Optional[SpeedMatrix] = None) -> Solution:
    """``strength`` random feasible relocations or swaps between routes."""
    if strength == 0:
        return solution
    pricer = Pricer(instance, speeds or SpeedMatrix.fresh(instance), solution.mode)
    plan = [r for r in _plan(solution) if r]
    done = attempts = 0
    while done < strength and attempts < 50 * strength and plan:
        attempts += 1
        r1 = int(rng.integers(len(plan)))
        r2 = int(rng.integers(len(plan)))
        A, B = plan[r1], plan[r2]
        i = int(rng.integers(len(A)))
        if rng.random() < 0.5 or r1 == r2:
            rest = A[:i] + A[i + 1:]
            tgt = rest if r1 == r2 else B
            j = int(rng.integers(len(tgt) + 1))
            new_b = tgt[:j] + (A[i],) + tgt[j:]
            cand = {r1: new_b} if r1 == r2 else {r1: rest, r2: new_b}
        else:
            j = int(rng.integers(len(B)))
            cand = {r1: A[:i] + (B[j],) + A[i + 1:], r2: B[:j] + (A[i],) + B[j + 1:]}
        if all(math.isfinite(pricer.cost(r)) for r in cand.values()):
            for r, route in cand.items():
                plan[r] = route
            plan = [r for r in plan if r]
            done += 1
    return _unscheduled(plan, pricer, solution.mode, solution.feasible)


@dataclass
class IlsResult:
    best: Optional[Solution]
    pool: RoutePool
    log: list = field(default_factory=list)
    timed_out: bool = False


def _restart_seed(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, restart]))


def ils_run(instance: Instance, cfg: IlsConfig = IlsConfig(),
            pool: Optional[RoutePool] = None) -> IlsResult:
    """Multi-start ILS with strict-descent acceptance.

    Every scheduled local optimum contributes its routes to ``pool``.
    """
    pool = pool if pool is not None else RoutePool(mode=cfg.mode)
    result = IlsResult(None, pool)
    deadline = time.perf_counter() + cfg.time_limit
    mode = cfg.mode

    def descend(sol: Solution, speeds: SpeedMatrix, rng) -> tuple:
        sol = local_search(sol, instance, speeds, rng, cfg.neighborhoods)
        sched = optimize_schedules(sol, instance, speeds)
        if sched is None:
            return None, speeds
        if sched.feasible:
            for route, s in zip(sched.routes, sched.schedules):
                pool.add(route, route_cost(route, s, instance, mode))
        return sched, update_speed_matrix(speeds, sched, instance, cfg.decay)

    for restart in range(max(cfg.restarts, 1)):
        rng = _restart_seed(cfg.seed, restart)
        speeds = SpeedMatrix.fresh(instance)
        start = construct(instance, rng, speeds, mode)
        current, speeds = descend(start, speeds, rng)
        if current is None or not current.feasible:
            result.log.append(dict(restart=restart, iteration=0, cost=math.inf, current=math.inf,
                                   best=_cost(result.best), accepted=False))
            continue
        if result.best is None or current.total_cost < result.best.total_cost - _IMPROVE:
            result.best = current
        result.log.append(dict(restart=restart, iteration=0, cost=current.total_cost,
                               current=current.total_cost, best=result.best.total_cost,
                               accepted=True))
        for it in range(1, cfg.iterations + 1):
            if time.perf_counter() > deadline:
                result.timed_out = True
                return result
            cand = perturb(current, instance, cfg.perturbation, rng, speeds)
            cand, speeds = descend(cand, speeds, rng)
            accepted = cand is not None and cand.feasible and \
                cand.total_cost < current.total_cost - _IMPROVE
            if accepted:
                current = cand
                if current.total_cost < result.best.total_cost - _IMPROVE:
                    result.best = current
            result.log.append(dict(restart=restart, iteration=it,
                                   cost=_cost(cand), current=current.total_cost,
                                   best=result.best.total_cost, accepted=accepted))
    return result


def _cost(sol: Optional[Solution]) -> float:
    return math.inf if sol is None else sol.total_cost
