"""Fixed vs free depot departure on generated 10-customer instances.

    python scripts/run_compare.py --instances 20 --seeds 2 --out compare.csv
"""

import argparse
import statistics
import sys

from pollrout import io
from pollrout.generate import gen_instance
from pollrout.ils import IlsConfig
from pollrout.runner import aggregate_row, compare_instance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--seeds", type=int, default=2)
    ap.add_argument("--first-instance-seed", type=int, default=1000)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    cfg = IlsConfig()
    rows = []
    for cls in "ABC":
        fixed, free, gaps = [], [], []
        for s in range(args.instances):
            inst = gen_instance(args.n, cls, args.first_instance_seed + s)
            cmp = compare_instance(inst, cfg, range(args.seeds), sp_time_limit=5.0)
            fx, fr = cmp.rows()
            fixed.append(fx)
            free.append(fr)
            gaps.append(cmp.reduction_pct)
        rows += fixed + free + [aggregate_row(fixed, f"AVG-{cls}"), aggregate_row(free, f"AVG-{cls}")]
        print(f"class {cls}: mean gap {statistics.mean(gaps):+.2f}%  "
              f"(min {min(gaps):+.2f}, max {max(gaps):+.2f})", file=sys.stderr)
    text = io.format_report(rows)
    if args.out:
        open(args.out, "w").write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
