#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy/SciPy fallbacks.

Times batched personalized PageRank and label propagation on synthetic graphs
at a few sizes and prints a speedup table. Run: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from kgrec.kernels import BACKEND, pure

try:
    from kgrec.kernels import _compiled
except ImportError:
    _compiled = None

from kgrec.pagerank import transition_csr


def random_graph(rng, n, arcs_per_node=12):
    n_arcs = n * arcs_per_node
    src = rng.integers(0, n, n_arcs)
    dst = rng.integers(0, n, n_arcs)
    return transition_csr(src, dst, n)


def bench_pagerank(backend, csr, teleport, repeats=3):
    indptr, indices, data, dangling = csr
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        backend.pagerank_power(indptr, indices, data, dangling, teleport, 0.85, 1e-8, 200)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_propagate(backend, csr, seeds, clamps, repeats=3):
    indptr, indices, data, _ = csr
    clamp_indptr, clamp_idx, clamp_val = clamps
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        backend.propagate_labels(indptr, indices, data, clamp_indptr, clamp_idx, clamp_val, seeds, 10)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if _compiled is None:
        print("compiled backend unavailable; build the extension first")
        return
    print(f"active backend: {BACKEND}")
    rng = np.random.default_rng(0)
    rows = []
    for n, m in [(2_000, 16), (10_000, 32), (20_000, 64)]:
        csr = random_graph(rng, n)
        teleport = np.zeros((m, n))
        for row in range(m):
            seeds = rng.choice(n, size=5, replace=False)
            teleport[row, seeds] = 1.0 / len(seeds)

        clamp_indptr = [0]
        clamp_idx, clamp_val = [], []
        seeds_mat = np.zeros((m, n))
        for row in range(m):
            picks = rng.choice(n, size=20, replace=False)
            vals = rng.choice([-1.0, 1.0], size=20)
            seeds_mat[row, picks] = vals
            clamp_idx.extend(picks.tolist())
            clamp_val.extend(vals.tolist())
            clamp_indptr.append(len(clamp_idx))
        clamps = (
            np.array(clamp_indptr, dtype=np.int64),
            np.array(clamp_idx, dtype=np.int64),
            np.array(clamp_val, dtype=np.float64),
        )

        pr_c = bench_pagerank(_compiled, csr, teleport)
        pr_p = bench_pagerank(pure, csr, teleport)
        lp_c = bench_propagate(_compiled, csr, seeds_mat, clamps)
        lp_p = bench_propagate(pure, csr, seeds_mat, clamps)
        rows.append((n, m, pr_c, pr_p, lp_c, lp_p))

    header = f"{'nodes':>7} {'batch':>5} | {'ppr compiled':>12} {'ppr pure':>10} {'speedup':>7} | {'prop compiled':>13} {'prop pure':>10} {'speedup':>7}"
    print(header)
    print("-" * len(header))
    for n, m, pr_c, pr_p, lp_c, lp_p in rows:
        print(
            f"{n:>7} {m:>5} | {pr_c:>11.3f}s {pr_p:>9.3f}s {pr_p / pr_c:>6.1f}x"
            f" | {lp_c:>12.3f}s {lp_p:>9.3f}s {lp_p / lp_c:>6.1f}x"
        )


if __name__ == "__main__":
    main()
