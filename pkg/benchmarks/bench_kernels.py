#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Covers the two hot loops behind the kernel boundary: bitmask
enumeration of connected subsets and Monte-Carlo trajectory walking.
Both backends produce bit-identical output, so the comparison is purely
about speed.

    python3 benchmarks/bench_kernels.py
"""

import pathlib
import sys
import time

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from spechit import lazy_rw_graph  # noqa: E402
from spechit._kernels import backends  # noqa: E402
from spechit.chain import support_neighbor_masks  # noqa: E402
from spechit.generators import random_connected_graph  # noqa: E402


def time_call(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_enumeration(mods):
    print("connected-subset enumeration")
    for n in (10, 12, 14):
        c = lazy_rw_graph(random_connected_graph(n, seed=n), 0.5)
        nbr = support_neighbor_masks(c)
        row = {}
        counts = set()
        for name, mod in mods.items():
            dt, (masks, _) = time_call(
                lambda m=mod: m.connected_masks(nbr, c.pi, 1.0, False))
            row[name] = dt
            counts.add(len(masks))
        assert len(counts) == 1, "backends disagree"
        speedup = row.get("pure", 0) / row.get("cython", row["pure"])
        print(f"  n={n:2d} ({counts.pop():5d} subsets): " +
              "  ".join(f"{k}={v * 1e3:8.2f}ms" for k, v in row.items()) +
              (f"  speedup x{speedup:.1f}" if "cython" in row else ""))


def bench_walks(mods):
    print("trajectory walking (hitting times)")
    c = lazy_rw_graph(random_connected_graph(12, seed=3), 0.5)
    cum_rows = np.cumsum(c.P, axis=1)
    start = np.zeros(12)
    start[0] = 1.0
    cum_start = np.cumsum(start)
    target = np.zeros(12, dtype=np.uint8)
    target[11] = 1
    for trials in (2_000, 20_000):
        row = {}
        sums = set()
        for name, mod in mods.items():
            def run(m=mod):
                key = np.array([np.uint64(5), np.uint64(1)], dtype=np.uint64)
                rng = np.random.Generator(np.random.Philox(key=key))
                return m.walk_hitting_times(cum_rows, cum_start, target,
                                            trials, 100_000, rng)
            dt, (steps, _) = time_call(run)
            row[name] = dt
            sums.add(int(steps.sum()))
        assert len(sums) == 1, "backends disagree"
        speedup = row.get("pure", 0) / row.get("cython", row["pure"])
        print(f"  trials={trials:6d}: " +
              "  ".join(f"{k}={v * 1e3:8.2f}ms" for k, v in row.items()) +
              (f"  speedup x{speedup:.1f}" if "cython" in row else ""))


def main():
    mods = backends()
    print("available backends:", ", ".join(mods))
    bench_enumeration(mods)
    bench_walks(mods)


if __name__ == "__main__":
    main()
