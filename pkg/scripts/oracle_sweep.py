"""Cross-check the route optimizer against the lattice DP and the
departure scan on random feasible routes; prints the worst gaps.

    python scripts/oracle_sweep.py --routes 300 --delta 1
"""

import argparse

import numpy as np

from pollrout.generate import gen_route_instance
from pollrout.oracle import verify_route


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--routes", type=int, default=300)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    worst_dp = worst_scan = 0.0
    failed = 0
    for n in range(args.routes):
        cls = "ABC"[n % 3]
        inst, route = gen_route_instance(int(rng.integers(2, 9)), cls, rng)
        rep = verify_route(route, inst, args.delta, args.grid)
        failed += not rep.passed
        worst_dp = max(worst_dp, abs(rep.sdtoa_cost - rep.dp_cost))
        worst_scan = max(worst_scan, abs(rep.sdtoa_cost - rep.scan_cost))
    print(f"routes {args.routes}  failed {failed}  worst |gap| dp {worst_dp:.3e}  scan {worst_scan:.3e}")


if __name__ == "__main__":
    main()
