"""Exhaustive exact-cover search over every subset of a small column list."""

import numpy as np


def brute_force_cover(columns, n, max_routes):
    """Cheapest subset of ``columns`` partitioning customers 1..n; None if none."""
    full = (1 << n) - 1
    masks = np.array([m for m, _ in columns], dtype=np.int64)
    costs = np.array([c for _, c in columns], dtype=float)
    pops = np.array([bin(int(m)).count("1") for m in masks], dtype=np.int64)
    orr = np.zeros(1, dtype=np.int64)
    cnt = np.zeros(1, dtype=np.int64)
    tot = np.zeros(1)
    k = np.zeros(1, dtype=np.int64)
    for j in range(len(columns)):
        orr = np.concatenate([orr, orr | masks[j]])
        cnt = np.concatenate([cnt, cnt + pops[j]])
        tot = np.concatenate([tot, tot + costs[j]])
        k = np.concatenate([k, k + 1])
    ok = (orr == full) & (cnt == n) & (k <= max_routes)
    if n == 0:
        return 0.0
    if not ok.any():
        return None
    return float(tot[ok].min())
