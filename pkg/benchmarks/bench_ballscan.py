#!/usr/bin/env python3
"""Benchmark: compiled ball-scan kernel vs pure Python fallback.

Times the depth-limited scan that dominates tester wall-clock, on planted
far instances across a size grid, and verifies both backends return
identical results.
"""

import time

import numpy as np

from starfree._kernels import compiled, pure
from starfree.digraph import PatternGraph
from starfree.instances import gen_far_h_instance


def bench(n: int, k: int, repeats: int = 5):
    pattern = PatternGraph.star(k)
    g, _ = gen_far_h_instance(n, 1, pattern, "0.05", seed=1)
    indptr, indices = g.csr()
    member = np.zeros(n, dtype=np.uint8)
    member[:: max(1, n // 200)] = 1  # ~200 touched vertices, like a stage scan
    skip = np.zeros(n, dtype=np.uint8)

    rows = {}
    for name, mod in (("pure", pure), ("compiled", compiled)):
        if mod is None:
            rows[name] = (None, None)
            continue
        out = mod.scan_candidates(indptr, indices, pattern.h, member, skip)
        t0 = time.perf_counter()
        for _ in range(repeats):
            mod.scan_candidates(indptr, indices, pattern.h, member, skip)
        rows[name] = ((time.perf_counter() - t0) / repeats, out)
    if rows["compiled"][0] is not None:
        assert np.array_equal(rows["pure"][1], rows["compiled"][1]), "backend mismatch"
    return rows


def main():
    print(f"{'n':>8} {'k':>2} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for k in (2, 3):
        for n in (1024, 4096, 16384, 65536):
            rows = bench(n, k)
            tp = rows["pure"][0] * 1e3
            if rows["compiled"][0] is None:
                print(f"{n:>8} {k:>2} {tp:>12.2f} {'n/a':>14} {'n/a':>8}")
            else:
                tc = rows["compiled"][0] * 1e3
                print(f"{n:>8} {k:>2} {tp:>12.2f} {tc:>14.2f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
