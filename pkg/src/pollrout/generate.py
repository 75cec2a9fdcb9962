"""Synthetic PRP instances and routes.

Tightness classes loosely follow the A/B/C benchmark sets: A has wide time
windows, B medium and C narrow. Geometry mimics the UK city instances: a
square region of ``side`` meters with the depot in the middle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Instance, Node, PrpParameters, Route
from .sdtoa import v_star_fuel_driver

# fraction of the customer's reachable interval covered by its window
WIDTH = {"A": (0.6, 1.0), "B": (0.15, 0.35), "C": (0.05, 0.15)}


@dataclass(frozen=True)
class GenConfig:
    side: float = 100_000.0
    horizon: float = 36_000.0
    demand: tuple = (100, 2000)
    service: tuple = (300, 1200)
    capacity: float = 3650.0


def _check_class(cls: str) -> str:
    cls = cls.upper()
    if cls not in WIDTH:
        raise ValueError(f"window class must be A, B or C, got {cls!r}")
    return cls


def gen_instance(n: int, cls: str = "A", seed: int = 0, cfg: GenConfig = GenConfig(),
                 name: str | None = None) -> Instance:
    """Random instance with ``n`` customers. Every customer can be served by
    a dedicated route at top speed, so the instance is always feasible."""
    cls = _check_class(cls)
    rng = np.random.default_rng(seed)
    params = PrpParameters(capacity_q=cfg.capacity, fleet_size_m=max(1, n))
    H = cfg.horizon
    depot = Node(0, cfg.side / 2, cfg.side / 2, 0.0, 0.0, H, 0.0)
    nodes = [depot]
    lo_w, hi_w = WIDTH[cls]
    for i in range(1, n + 1):
        x, y = rng.uniform(0, cfg.side, size=2)
        q = float(rng.integers(cfg.demand[0], cfg.demand[1] + 1))
        tau = float(rng.integers(cfg.service[0], cfg.service[1] + 1))
        d0 = float(np.hypot(x - depot.x, y - depot.y))
        earliest = np.ceil(d0 / params.v_max)
        latest = np.floor(H - tau - d0 / params.v_max)
        span = max(latest - earliest, 0.0)
        w = np.floor(rng.uniform(lo_w, hi_w) * span)
        a = float(earliest + np.floor(rng.uniform(0, span - w + 1e-9)))
        nodes.append(Node(i, float(x), float(y), q, a, a + float(w), tau))
    return Instance(name or f"gen{n}-{cls}-{seed}", tuple(nodes), params)


def gen_route_instance(k: int, cls: str, rng: np.random.Generator,
                       params: PrpParameters = PrpParameters(), side: float = 60_000.0):
    """A ``k``-customer instance plus a route through all customers that is
    feasible by construction.

    A nominal trip is simulated at random speeds in ``[0.8 v_fd, v_max]``
    with random idle periods, and every window is drawn around the nominal
    service start, so the nominal schedule certifies feasibility.
    """
    cls = _check_class(cls)
    v_fd = v_star_fuel_driver(params)
    xy = rng.uniform(0, side, size=(k + 1, 2))
    xy[0] = side / 2
    services = rng.integers(60, 900, size=k + 1).astype(float)
    services[0] = 0.0
    demands = rng.integers(50, 800, size=k + 1).astype(float)
    demands[0] = 0.0
    start = float(np.round(rng.uniform(0, 6000)))
    t = start
    nominal = [t]
    for i in range(1, k + 2):
        prev, cur = i - 1, i % (k + 1)
        d = float(np.hypot(*(xy[cur] - xy[prev])))
        v = rng.uniform(0.8 * v_fd, params.v_max)
        idle = rng.exponential(600.0) if rng.random() < 0.3 else 0.0
        t = t + services[prev] + d / v + idle
        nominal.append(t)
    end = nominal[-1]
    horizon = float(np.ceil(end + rng.uniform(0, 4000)))
    lo_w, hi_w = WIDTH[cls]
    scale = end - start
    nodes = [Node(0, float(xy[0, 0]), float(xy[0, 1]), 0.0, 0.0, horizon, 0.0)]
    for i in range(1, k + 1):
        w = rng.uniform(lo_w, hi_w) * scale * 0.5
        before = rng.uniform(0, w)
        a = max(0.0, float(np.floor(nominal[i] - before)))
        b = float(np.ceil(nominal[i] + (w - before)))
        nodes.append(Node(i, float(xy[i, 0]), float(xy[i, 1]), float(demands[i]), a, b,
                          float(services[i])))
    cap = max(params.capacity_q, float(demands.sum()))
    params = PrpParameters(**{**params.__dict__, "capacity_q": cap})
    inst = Instance(f"route{k}-{cls}", tuple(nodes), params)
    return inst, Route.of(range(1, k + 1))
