"""Command line interface: ``pollrout <command> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import io
from .generate import gen_instance
from .ils import IlsConfig
from .model import FIXED, FREE, InputError, Solution, validate
from .oracle import verify_route
from .runner import DEFAULT_SEEDS, aggregate_row, compare_instance, config_hash, solve_instance
from .sdtoa import optimize_route


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    return io.parse_instance(args.instance, args.format)


def _ils_config(args, mode=None) -> IlsConfig:
    return IlsConfig(iterations=args.iterations, restarts=args.restarts,
                     perturbation=args.perturbation, seed=args.seed,
                     time_limit=args.time_limit if args.time_limit else math.inf,
                     mode=mode or getattr(args, "mode", FREE))


def _seeds(args) -> list:
    return list(range(args.seed, args.seed + args.seeds))


def _meta(args, cfg: IlsConfig, wall: float) -> dict:
    return dict(seeds=_seeds(args), config_hash=config_hash(cfg), wall_s=round(wall, 3),
                iterations=cfg.iterations, restarts=cfg.restarts,
                perturbation=cfg.perturbation, time_limit=args.time_limit)


def _write_meta(args, meta: dict) -> None:
    if getattr(args, "report", None) or getattr(args, "out", None):
        target = Path((getattr(args, "report", None) or args.out) + ".meta.json")
        target.write_text(json.dumps(meta, indent=2) + "\n")
    else:
        print("# " + json.dumps(meta), file=sys.stderr)


def cmd_gen(args) -> int:
    inst = gen_instance(args.n, args.cls, args.seed)
    _emit(io.format_instance(inst), args.out)
    return 0


def cmd_speedopt(args) -> int:
    inst = _load(args)
    route = io.parse_route(args.route)
    res = optimize_route(route, inst, args.mode)
    if not res.feasible:
        print(f"infeasible: residual violation {res.violation:.6f} s at position {res.position}",
              file=sys.stderr)
        return 1
    sol = Solution((route,), (res.schedule,), res.cost, args.mode)
    _emit(io.format_solution(sol, inst), args.out)
    return 0


def cmd_verify(args) -> int:
    inst = _load(args)
    route = io.parse_route(args.route)
    rep = verify_route(route, inst, args.delta, args.grid)
    print("\n".join(rep.lines()))
    for v in rep.violations:
        print(f"  {v}")
    return 0 if rep.passed else 1


def cmd_validate(args) -> int:
    inst = _load(args)
    sol = io.parse_solution(args.solution)
    viol = validate(sol, inst)
    for v in viol:
        print(v)
    print("feasible" if not viol else f"{len(viol)} violation(s)")
    return 0 if not viol else 1


def _baseline(args) -> dict:
    return io.read_baseline(args.baseline) if args.baseline else {}


def cmd_solve(args) -> int:
    inst = _load(args)
    cfg = _ils_config(args)
    t0 = time.perf_counter()
    out = solve_instance(inst, cfg, _seeds(args), args.sp_time_limit, args.jobs)
    base = _baseline(args).get(inst.name)
    viol = validate(out.best, inst)
    if viol:
        for v in viol:
            print(v, file=sys.stderr)
        return 1
    _emit(io.format_solution(out.best, inst), args.out)
    report = io.format_report([out.row(base)])
    if args.report:
        Path(args.report).write_text(report)
    else:
        sys.stderr.write(report)
    _write_meta(args, _meta(args, cfg, time.perf_counter() - t0))
    return 0


def cmd_bench(args) -> int:
    cfg = _ils_config(args)
    base = _baseline(args)
    rows = []
    t0 = time.perf_counter()
    for path in args.instance:
        inst = io.parse_instance(path, args.format)
        out = solve_instance(inst, cfg, _seeds(args), args.sp_time_limit, args.jobs)
        if validate(out.best, inst):
            print(f"{inst.name}: emitted solution fails validation", file=sys.stderr)
            return 1
        rows.append(out.row(base.get(inst.name)))
    rows.append(aggregate_row(rows))
    _emit(io.format_report(rows), args.out)
    _write_meta(args, _meta(args, cfg, time.perf_counter() - t0))
    return 0


def cmd_compare(args) -> int:
    cfg = _ils_config(args)
    base = _baseline(args)
    fixed_rows, free_rows = [], []
    t0 = time.perf_counter()
    for path in args.instance:
        inst = io.parse_instance(path, args.format)
        cmp = compare_instance(inst, cfg, _seeds(args), args.sp_time_limit, args.jobs)
        for outcome in (cmp.fixed, cmp.free):
            if validate(outcome.best, inst):
                print(f"{inst.name}/{outcome.mode}: solution fails validation", file=sys.stderr)
                return 1
        fx, fr = cmp.rows(base.get(inst.name))
        fixed_rows.append(fx)
        free_rows.append(fr)
        print(f"{inst.name}: fixed {fx.best_cost:.4f}  free {fr.best_cost:.4f}  "
              f"change {cmp.reduction_pct:+.2f}%", file=sys.stderr)
    rows = fixed_rows + free_rows
    rows += [aggregate_row(fixed_rows, "AVG"), aggregate_row(free_rows, "AVG")]
    _emit(io.format_report(rows), args.out)
    _write_meta(args, _meta(args, cfg, time.perf_counter() - t0))
    return 0


def _instance_args(p, many=False):
    if many:
        p.add_argument("--instance", nargs="+", required=True)
    else:
        p.add_argument("--instance", required=True)
    p.add_argument("--format", choices=("canonical", "prplib"), default="canonical")


def _search_args(p):
    p.add_argument("--seeds", type=int, default=DEFAULT_SEEDS, help="number of seeds")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--time-limit", type=float, default=None, help="per-run ILS limit (s)")
    p.add_argument("--sp-time-limit", type=float, default=60.0)
    p.add_argument("--iterations", type=int, default=IlsConfig.iterations)
    p.add_argument("--restarts", type=int, default=IlsConfig.restarts)
    p.add_argument("--perturbation", type=int, default=IlsConfig.perturbation)
    p.add_argument("--jobs", type=int, default=1, help="parallel seed workers")
    p.add_argument("--baseline", help="CSV of instance,cost for gap computation")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pollrout", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="cls", choices=("A", "B", "C"), default="A")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("speedopt", help="optimize speeds/departure on one route")
    _instance_args(p)
    p.add_argument("--route", required=True, help="e.g. 0,3,1,0")
    p.add_argument("--mode", choices=(FIXED, FREE), default=FREE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_speedopt)

    p = sub.add_parser("verify", help="cross-check one route against the oracles")
    _instance_args(p)
    p.add_argument("--route", required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=10_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("validate", help="check a solution file")
    _instance_args(p)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="ILS + set partitioning over several seeds")
    _instance_args(p)
    _search_args(p)
    p.add_argument("--mode", choices=(FIXED, FREE), default=FREE)
    p.add_argument("--out", help="solution file")
    p.add_argument("--report", help="CSV report file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="solve several instances, CSV report")
    _instance_args(p, many=True)
    _search_args(p)
    p.add_argument("--mode", choices=(FIXED, FREE), default=FREE)
    p.add_argument("--out", help="CSV report file")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="fixed vs free depot departure")
    _instance_args(p, many=True)
    _search_args(p)
    p.add_argument("--out", help="CSV report file")
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
