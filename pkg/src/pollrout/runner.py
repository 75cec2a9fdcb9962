"""Multi-seed solve and fixed-vs-free departure comparison."""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Optional, Sequence

from .ils import IlsConfig, ils_run
from .io import ReportRow, gap_pct
from .model import FIXED, FREE, Instance, Solution
from .setpart import RoutePool, solve_sp

DEFAULT_SEEDS = 10


@dataclass
class SeedRun:
    seed: int
    cost: float
    cpu_s: float
    solution: Solution
    pool_entries: list
    timed_out: bool


@dataclass
class SolveOutcome:
    instance: str
    mode: str
    best: Solution
    runs: list
    pool_size: int
    sp_optimal: bool

    @property
    def avg_cost(self) -> float:
        return sum(r.cost for r in self.runs) / len(self.runs)

    @property
    def cpu_s(self) -> float:
        return sum(r.cpu_s for r in self.runs) / len(self.runs)

    def row(self, baseline: Optional[float] = None) -> ReportRow:
        gap = None if baseline is None else gap_pct(self.best.total_cost, baseline)
        return ReportRow(self.instance, self.mode, self.avg_cost, self.best.total_cost,
                         self.cpu_s, gap)


def config_hash(cfg: IlsConfig) -> str:
    blob = json.dumps(asdict(cfg), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _one_seed(instance: Instance, cfg: IlsConfig, sp_time_limit: Optional[float]) -> SeedRun:
    t0 = time.process_time()
    res = ils_run(instance, cfg)
    best = res.best
    sp = solve_sp(res.pool, instance, sp_time_limit) if len(res.pool) else None
    if sp is not None and (best is None or sp.solution.total_cost < best.total_cost):
        best = sp.solution
    if best is None:
        raise RuntimeError(f"no feasible solution found for {instance.name} (seed {cfg.seed})")
    cpu = time.process_time() - t0
    return SeedRun(cfg.seed, best.total_cost, cpu, best, res.pool.entries(), res.timed_out)


def solve_instance(instance: Instance, cfg: IlsConfig, seeds: Sequence[int],
                   sp_time_limit: Optional[float] = 60.0, jobs: int = 1) -> SolveOutcome:
    """ILS + set partitioning per seed, then one more partitioning over the
    union of all seeds' pools. Seeds run in parallel processes when
    ``jobs > 1``; results are merged in seed order, so output is unchanged."""
    cfgs = [replace(cfg, seed=int(s)) for s in seeds]
    if jobs > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            runs = list(ex.map(_one_seed, [instance] * len(cfgs), cfgs,
                               [sp_time_limit] * len(cfgs)))
    else:
        runs = [_one_seed(instance, c, sp_time_limit) for c in cfgs]
    merged = RoutePool(mode=cfg.mode)
    for run in runs:
        for e in run.pool_entries:
            merged.add_entry(e)
    best = min((r.solution for r in runs), key=lambda s: s.total_cost)
    sp = solve_sp(merged, instance, sp_time_limit)
    optimal = True
    if sp is not None:
        optimal = sp.optimal
        if sp.solution.total_cost < best.total_cost:
            best = sp.solution
    return SolveOutcome(instance.name, cfg.mode, best, runs, len(merged), optimal)


@dataclass
class Comparison:
    fixed: SolveOutcome
    free: SolveOutcome

    @property
    def reduction_pct(self) -> float:
        """Gap of the free-departure best against the fixed-departure best."""
        return gap_pct(self.free.best.total_cost, self.fixed.best.total_cost)

    def rows(self, baseline: Optional[float] = None) -> list:
        return [self.fixed.row(baseline), self.free.row(self.fixed.best.total_cost)]


def compare_instance(instance: Instance, cfg: IlsConfig, seeds: Sequence[int],
                     sp_time_limit: Optional[float] = 60.0, jobs: int = 1) -> Comparison:
    fixed = solve_instance(instance, replace(cfg, mode=FIXED), seeds, sp_time_limit, jobs)
    free = solve_instance(instance, replace(cfg, mode=FREE), seeds, sp_time_limit, jobs)
    return Comparison(fixed, free)


def aggregate_row(rows: Sequence[ReportRow], name: str = "AVG") -> ReportRow:
    """Column-wise mean of report rows (gaps averaged over rows that have one)."""
    k = len(rows)
    gaps = [r.gap_pct for r in rows if r.gap_pct is not None]
    mode = rows[0].mode if len({r.mode for r in rows}) == 1 else "mixed"
    return ReportRow(name, mode, sum(r.avg_cost for r in rows) / k,
                     sum(r.best_cost for r in rows) / k, sum(r.cpu_s for r in rows) / k,
                     sum(gaps) / len(gaps) if gaps else None)
