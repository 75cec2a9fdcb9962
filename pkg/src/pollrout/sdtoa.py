"""Speed and departure-time optimization on a fixed route.

``sdtoa`` treats the depot departure as a decision variable; ``soa`` is the
same divide-and-conquer with the departure pinned, which is how speed
optimization was done before departure times were optimized.

The recursion relaxes all intermediate time windows, spreads the segment
duration at one uniform reference speed, and if some visit falls outside its
window pins the worst offender to the nearest window bound and solves the two
halves independently. Every split pins one interior visit for good, so a
route of length ``n`` needs at most ``2n`` segment solves of ``O(n)`` each.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import (FIXED, FREE, InputError, Instance, PrpParameters, Route, Schedule,
                    route_cost, route_loads)

_EPS = 1e-9


def v_star_fuel(params: PrpParameters) -> float:
    """Speed minimizing fuel per meter, clamped to the speed bounds."""
    return params.clamp_speed((params.w1 / (2.0 * params.w4)) ** (1.0 / 3.0))


def v_star_fuel_driver(params: PrpParameters) -> float:
    """Speed minimizing fuel plus driver cost per meter when nobody waits."""
    ratio = params.omega_fd / params.omega_fc
    return params.clamp_speed(((ratio + params.w1) / (2.0 * params.w4)) ** (1.0 / 3.0))


@dataclass(frozen=True)
class SpeedOptResult:
    schedule: Optional[Schedule]
    cost: float
    recursion_count: int
    violation: float = 0.0
    position: Optional[int] = None

    @property
    def feasible(self) -> bool:
        return self.schedule is not None


class _Infeasible(Exception):
    def __init__(self, violation: float, position: int):
        super().__init__(violation, position)
        self.violation = violation
        self.position = position


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(lo, x), hi)


class SpeedProblem:
    """Per-route data shared across repeated solves (e.g. departure scans)."""

    def __init__(self, route: Route, instance: Instance):
        self.route = route
        self.instance = instance
        p = instance.params
        vs = route.visits
        nodes = instance.nodes
        self.n = len(vs)
        self.d = [float(instance.dist[vs[k], vs[k + 1]]) for k in range(self.n - 1)]
        self.tau = [nodes[v].service for v in vs]
        self.a = [nodes[v].tw_start for v in vs]
        self.b = [nodes[v].tw_end for v in vs]
        self.cum_d = [0.0]
        self.cum_tau = [0.0]
        for k in range(self.n - 1):
            self.cum_d.append(self.cum_d[-1] + self.d[k])
            self.cum_tau.append(self.cum_tau[-1] + self.tau[k])
        self.loads = route_loads(route, instance)
        self.v_f = v_star_fuel(p)
        self.v_fd = v_star_fuel_driver(p)
        self.params = p

    def _arrivals(self, departure: Optional[float]) -> tuple:
        n, a, b, d, tau = self.n, self.a, self.b, self.d, self.tau
        cum_d, cum_tau, v_fd = self.cum_d, self.cum_tau, self.v_fd
        free = departure is None
        last = n - 1
        t = [0.0] * n
        t[0] = a[0] if free else departure
        calls = 0
        stack = [(0, last)]
        while stack:
            s, e = stack.pop()
            calls += 1
            D = cum_d[e] - cum_d[s]
            T = cum_tau[e] - cum_tau[s]
            if e == last:
                t[e] = _clamp(t[s] + D / v_fd + T, a[e], b[e])
            if s == 0 and free:
                t[0] = _clamp(t[e] - D / v_fd - T, a[0], b[0])
            span = t[e] - t[s] - T
            if D > 0:
                if span <= 0:
                    raise _Infeasible(-span + D / self.params.v_max, e)
                pace = span / D  # seconds per meter at the reference speed
            else:
                if span < -_EPS:
                    raise _Infeasible(-span, e)
                pace = 0.0
            worst, p = 0.0, -1
            ti = t[s]
            for i in range(s + 1, e):
                ti = ti + tau[i - 1] + d[i - 1] * pace
                t[i] = ti
                viol = max(ti - b[i], a[i] - ti)
                if viol > _EPS and viol > worst:
                    worst, p = viol, i
            if p > 0:
                t[p] = _clamp(t[p], a[p], b[p])
                stack.append((p, e))
                stack.append((s, p))
        return t, calls

    def solve(self, departure: Optional[float] = None) -> SpeedOptResult:
        """``departure=None`` optimizes it; otherwise it is pinned."""
        if departure is not None and not (self.a[0] - _EPS <= departure <= self.b[0] + _EPS):
            raise InputError(f"departure {departure} outside depot window [{self.a[0]}, {self.b[0]}]")
        try:
            t, calls = self._arrivals(departure)
        except _Infeasible as exc:
            return SpeedOptResult(None, float("inf"), 0, exc.violation, exc.position)

        p = self.params
        speeds, waits = [], [0.0] * self.n
        worst, worst_pos = 0.0, None
        fuel = 0.0
        for k in range(self.n - 1):
            dk = self.d[k]
            gap = t[k + 1] - t[k] - self.tau[k]
            if dk > 0:
                short = dk / p.v_max - gap
                if short > _EPS:
                    if short > worst:
                        worst, worst_pos = short, k + 1
                    speeds.append(p.v_max)
                    continue
                v = max(dk / gap, self.v_f)
            else:
                if gap < -_EPS and -gap > worst:
                    worst, worst_pos = -gap, k + 1
                v = self.v_f
            speeds.append(v)
            waits[k + 1] = max(0.0, gap - dk / v)
            fuel += dk * (p.w1 / v + p.w2 + p.w3 * self.loads[k] + p.w4 * v * v)
        if worst_pos is not None:
            return SpeedOptResult(None, float("inf"), calls, worst, worst_pos)
        sched = Schedule(tuple(t), tuple(speeds), tuple(waits))
        cost = p.omega_fc * fuel + p.omega_fd * (t[-1] - t[0])
        return SpeedOptResult(sched, cost, calls)


def sdtoa(route: Route, instance: Instance) -> SpeedOptResult:
    """Optimal speeds and depot departure; cost is fuel plus driver time
    counted from the chosen departure."""
    return SpeedProblem(route, instance).solve(None)


def soa(route: Route, instance: Instance, departure: Optional[float] = None) -> SpeedOptResult:
    """Speed optimization with the depot departure pinned (default: depot opening).

    Driver time is charged from ``departure``; at departure 0 this is the
    classic fixed-departure objective.
    """
    if departure is None:
        departure = instance.depot.tw_start
    return SpeedProblem(route, instance).solve(float(departure))


def optimize_route(route: Route, instance: Instance, mode: str = FREE) -> SpeedOptResult:
    """Schedule a route under an objective mode, with the cost of that mode."""
    if mode == FREE:
        return sdtoa(route, instance)
    if mode != FIXED:
        raise InputError(f"unknown objective mode {mode!r}")
    res = soa(route, instance)
    if not res.feasible:
        return res
    return SpeedOptResult(res.schedule, route_cost(route, res.schedule, instance, FIXED),
                          res.recursion_count)
