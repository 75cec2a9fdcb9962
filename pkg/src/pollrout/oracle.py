"""Brute-force verifiers for the route speed optimizer.

``oracle_dp`` is a dynamic program over a lattice of service-start times.
Between two lattice times the best arc cost is available in closed form
(drive at the fuel-optimal speed if there is room, wait out the rest), so the
only approximation is the lattice itself and the DP value is an upper bound
on the continuous optimum.

The per-arc cost is convex in the time gap between consecutive visits, which
makes the transition matrix Monge; row minima are then monotone and each
stage costs ``O((L + L') log L)`` instead of ``O(L L')``. A dense numpy
transition is kept for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from .model import InputError, Instance, PrpParameters, Route, route_loads
from .sdtoa import SpeedProblem

_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class OracleConfig:
    delta: float = 1.0
    horizon_padding: float = 3600.0
    max_points: int = 10_000_000
    method: str = "monotone"

    def __post_init__(self):
        if not self.delta > 0:
            raise InputError("delta must be positive")
        if self.method not in ("monotone", "dense"):
            raise InputError(f"unknown oracle method {self.method!r}")


@dataclass(frozen=True)
class OracleResult:
    cost: float
    arrivals: Optional[tuple]
    departure: Optional[float] = None

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.cost)


def lipschitz(params: PrpParameters) -> float:
    """Bound on |d cost / d gap| of one arc, over all admissible speeds.

    The slope of fuel in travel time is ``w1 - 2 w4 v^3``, which only depends
    on the speed, so one constant serves every arc.
    """
    slope = max(abs(params.w1 - 2 * params.w4 * params.v_max**3),
                abs(params.w1 - 2 * params.w4 * params.v_min**3))
    return params.omega_fd + params.omega_fc * slope


def epsilon(n_visits: int, params: PrpParameters, delta: float) -> float:
    """Worst-case lattice error: each arrival moves at most ``delta``."""
    return 2.0 * delta * (n_visits - 1) * lipschitz(params)


def lattice(a: float, b: float, delta: float) -> np.ndarray:
    """Points ``a, a+delta, ...`` inside ``[a, b]``, always including ``b``."""
    pts = np.arange(a, b, delta, dtype=float)
    if len(pts) == 0 or b - pts[-1] > 1e-9:
        pts = np.append(pts, b)
    return pts


@numba.njit(cache=True)
def _arc_cost(g, tau, lo, hi, const, w1, w4d3, ofc, ofd):
    travel = g - tau
    if travel < lo - _FEAS_TOL:
        return np.inf
    dt = min(travel, hi)
    if w4d3 > 0.0:
        if dt < lo:
            dt = lo
        fuel = w1 * dt + const + w4d3 / (dt * dt)
    else:
        fuel = 0.0
    return ofc * fuel + ofd * g


@numba.njit(cache=True)
def _stage_monotone(tp, V, tn, tau, lo, hi, const, w1, w4d3, ofc, ofd):
    m = tn.shape[0]
    nc = tp.shape[0]
    out = np.full(m, np.inf)
    arg = np.full(m, -1, dtype=np.int64)
    cnt = np.searchsorted(tp, tn - tau - lo + _FEAS_TOL, side="right")
    r0 = 0
    while r0 < m and cnt[r0] == 0:
        r0 += 1
    if r0 == m or nc == 0:
        return out, arg
    stack = np.empty((4 * (m + 1), 4), dtype=np.int64)
    top = 0
    stack[0, 0] = r0
    stack[0, 1] = m - 1
    stack[0, 2] = 0
    stack[0, 3] = nc - 1
    top = 1
    while top > 0:
        top -= 1
        rlo = stack[top, 0]
        rhi = stack[top, 1]
        clo = stack[top, 2]
        chi = stack[top, 3]
        if rlo > rhi:
            continue
        mid = (rlo + rhi) // 2
        hi_c = min(chi, cnt[mid] - 1)
        best = np.inf
        bj = -1
        for j in range(clo, hi_c + 1):
            val = V[j] + _arc_cost(tn[mid] - tp[j], tau, lo, hi, const, w1, w4d3, ofc, ofd)
            if val < best:
                best = val
                bj = j
        if bj < 0:
            bj = clo
        else:
            out[mid] = best
            arg[mid] = bj
        stack[top, 0] = rlo
        stack[top, 1] = mid - 1
        stack[top, 2] = clo
        stack[top, 3] = bj
        top += 1
        stack[top, 0] = mid + 1
        stack[top, 1] = rhi
        stack[top, 2] = bj
        stack[top, 3] = chi
        top += 1
    return out, arg


def _stage_dense(tp, V, tn, tau, lo, hi, const, w1, w4d3, ofc, ofd, chunk=2048):
    out = np.full(len(tn), np.inf)
    arg = np.full(len(tn), -1, dtype=np.int64)
    for r in range(0, len(tn), chunk):
        g = tn[r:r + chunk, None] - tp[None, :]
        travel = g - tau
        ok = travel >= lo - _FEAS_TOL
        dt = np.clip(np.minimum(travel, hi), lo, None)
        if w4d3 > 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                fuel = w1 * dt + const + w4d3 / (dt * dt)
        else:
            fuel = np.zeros_like(dt)
        total = np.where(ok, ofc * fuel + ofd * g + V[None, :], np.inf)
        j = np.argmin(total, axis=1)
        val = total[np.arange(len(j)), j]
        out[r:r + chunk] = val
        arg[r:r + chunk] = np.where(np.isfinite(val), j, -1)
    return out, arg


def _windows(route: Route, instance: Instance, padding: float):
    nodes = [instance.nodes[v] for v in route.visits]
    a = np.array([nd.tw_start for nd in nodes])
    b = np.array([nd.tw_end for nd in nodes])
    if not np.isfinite(b).all():
        p = instance.params
        d = sum(instance.dist[route.visits[k], route.visits[k + 1]] for k in range(len(nodes) - 1))
        finite = b[np.isfinite(b)]
        reach = a.max() + d / p.v_min + sum(nd.service for nd in nodes)
        cap = max(finite.max() if len(finite) else reach, reach) + padding
        b = np.where(np.isfinite(b), b, cap)
    return a, b


def oracle_dp(route: Route, instance: Instance, cfg: OracleConfig = OracleConfig()) -> OracleResult:
    """Cheapest schedule whose service starts all lie on the lattice.

    Objective is fuel plus driver time from the (free) depot departure.
    """
    p = instance.params
    vs = route.visits
    a, b = _windows(route, instance, cfg.horizon_padding)
    grids = [lattice(a[i], b[i], cfg.delta) for i in range(len(vs))]
    if sum(len(g) for g in grids) > cfg.max_points:
        raise InputError("lattice too large for the oracle; increase delta")
    loads = route_loads(route, instance)
    vf_raw = (p.w1 / (2 * p.w4)) ** (1 / 3)
    stage = _stage_monotone if cfg.method == "monotone" else _stage_dense

    cols = np.arange(len(grids[0]))
    V = np.zeros(len(grids[0]))
    back = []
    for k in range(len(vs) - 1):
        i, j = vs[k], vs[k + 1]
        d = float(instance.dist[i, j])
        tau = instance.nodes[i].service
        lo = d / p.v_max
        hi = min(max(d / vf_raw, d / p.v_max), d / p.v_min)
        const = (p.w2 + p.w3 * loads[k]) * d
        tp = grids[k][cols]
        out, arg = stage(tp, V, grids[k + 1], tau, lo, hi, const, p.w1, p.w4 * d**3,
                         p.omega_fc, p.omega_fd)
        prev_idx = np.where(arg >= 0, cols[np.maximum(arg, 0)], -1)
        back.append(prev_idx)
        keep = np.flatnonzero(np.isfinite(out))
        if len(keep) == 0:
            return OracleResult(math.inf, None)
        cols, V = keep, out[keep]

    best = int(np.argmin(V))
    cost = float(V[best])
    idx = int(cols[best])
    times = [float(grids[-1][idx])]
    for k in range(len(vs) - 2, -1, -1):
        idx = int(back[k][idx])
        times.append(float(grids[k][idx]))
    times.reverse()
    return OracleResult(cost, tuple(times), times[0])


@dataclass(frozen=True)
class ScanResult:
    cost: float
    departure: Optional[float]

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.cost)


def departure_scan(route: Route, instance: Instance, grid: int = 10_000) -> ScanResult:
    """Best fixed-departure schedule over ``grid`` departures spread over the
    depot window; driver time counted from each departure."""
    if grid < 2:
        raise InputError("grid must be >= 2")
    prob = SpeedProblem(route, instance)
    a0 = instance.depot.tw_start
    b0 = instance.depot.tw_end
    if not math.isfinite(b0):
        _, b = _windows(route, instance, 0.0)
        b0 = float(b[0])
    best = ScanResult(math.inf, None)
    for dep in np.linspace(a0, b0, grid):
        res = prob.solve(float(dep))
        if res.cost < best.cost:
            best = ScanResult(res.cost, float(dep))
    return best


@dataclass(frozen=True)
class VerifyReport:
    sdtoa_cost: float
    dp_cost: float
    scan_cost: float
    eps_dp: float
    eps_scan: float
    violations: tuple

    @property
    def dp_ok(self) -> bool:
        if not (math.isfinite(self.sdtoa_cost) and math.isfinite(self.dp_cost)):
            return math.isfinite(self.sdtoa_cost) == math.isfinite(self.dp_cost)
        return abs(self.sdtoa_cost - self.dp_cost) <= self.eps_dp

    @property
    def scan_ok(self) -> bool:
        if not (math.isfinite(self.sdtoa_cost) and math.isfinite(self.scan_cost)):
            return math.isfinite(self.sdtoa_cost) == math.isfinite(self.scan_cost)
        return abs(self.sdtoa_cost - self.scan_cost) <= self.eps_scan

    @property
    def passed(self) -> bool:
        return self.dp_ok and self.scan_ok and not self.violations

    def lines(self) -> list:
        flag = lambda ok: "PASS" if ok else "FAIL"  # noqa: E731
        return [f"sdtoa          {self.sdtoa_cost:.6f}",
                f"oracle_dp      {self.dp_cost:.6f}  eps={self.eps_dp:.6f}  {flag(self.dp_ok)}",
                f"departure_scan {self.scan_cost:.6f}  eps={self.eps_scan:.6f}  {flag(self.scan_ok)}",
                f"violations     {len(self.violations)}",
                f"overall        {flag(self.passed)}"]


def verify_route(route: Route, instance: Instance, delta: float = 1.0, grid: int = 10_000,
                 cfg: Optional[OracleConfig] = None) -> VerifyReport:
    """Cross-check the speed optimizer against both brute-force oracles."""
    from .model import validate_route
    from .sdtoa import sdtoa

    res = sdtoa(route, instance)
    viol = tuple(validate_route(route, res.schedule, instance)) if res.feasible else ()
    dp = oracle_dp(route, instance, cfg or OracleConfig(delta=delta))
    scan = departure_scan(route, instance, grid)
    _, b = _windows(route, instance, 0.0)
    step = (b[0] - instance.depot.tw_start) / (grid - 1)
    p = instance.params
    return VerifyReport(res.cost, dp.cost, scan.cost, epsilon(len(route), p, delta),
                        epsilon(len(route), p, step), viol)
