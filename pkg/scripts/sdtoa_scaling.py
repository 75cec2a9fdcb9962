"""Runtime and call count of the route optimizer as the route grows.

    python scripts/sdtoa_scaling.py --sizes 50 100 200 400 800
"""

import argparse
import statistics
import time

import numpy as np

from pollrout.generate import gen_route_instance
from pollrout.sdtoa import sdtoa


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400, 800])
    ap.add_argument("--routes", type=int, default=15)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    base = None
    print(f"{'size':>6} {'median_ms':>10} {'ratio':>7} {'max_calls':>10} {'2|sigma|':>9}")
    for size in args.sizes:
        times, calls = [], []
        for n in range(args.routes):
            inst, route = gen_route_instance(size - 2, "ABC"[n % 3], rng)
            best = float("inf")
            for _ in range(3):
                t0 = time.perf_counter()
                res = sdtoa(route, inst)
                best = min(best, time.perf_counter() - t0)
            times.append(best)
            calls.append(res.recursion_count)
        med = statistics.median(times)
        base = base or med
        print(f"{size:>6} {1000 * med:>10.3f} {med / base:>7.1f} {max(calls):>10} {2 * size:>9}")


if __name__ == "__main__":
    main()
