#!/usr/bin/env python3
"""Compare the compiled and pure-numpy scoring kernels on search workloads.

Times full partition scoring (relabel + per-order evidence) on corpora of
increasing size, plus one exhaustive search, with each backend. Run after an
editable install:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from pathgroups import (
    PartitionScorer,
    assemble_truth,
    build_counts,
    exhaustive_search,
    make_random_mon,
    sample_paths,
)
from pathgroups.kernels import HAVE_COMPILED


def timed(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_scoring(counts, n_labels, n_candidates, backend, seed=0):
    scorer = PartitionScorer(counts, n_labels, backend=backend)
    rng = np.random.default_rng(seed)
    candidates = rng.integers(0, n_labels, size=(n_candidates, counts.n_symbols)).astype(np.int32)

    def run():
        total = 0.0
        for labels in candidates:
            total += scorer.breakdown(labels).log_marginal
        return total

    return timed(run)


def main():
    backends = ["pure"] + (["compiled"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("compiled kernels unavailable; timing the pure backend only\n")

    print(f"{'workload':<44} " + " ".join(f"{b:>12}" for b in backends) + "  speedup")
    configs = [
        ("9 nodes, 1e3 paths, k_max=2, 2000 scores", 9, 3, 1000, 2, 2000),
        ("9 nodes, 1e4 paths, k_max=3, 2000 scores", 9, 3, 10**4, 3, 2000),
        ("27 nodes, 1e4 paths, k_max=2, 500 scores", 27, 3, 10**4, 2, 500),
    ]
    for label, n_nodes, n_groups, n_paths, k_max, n_cand in configs:
        rng = np.random.default_rng(7)
        truth = assemble_truth(
            make_random_mon(n_groups, min(k_max, 2), rng),
            [n_nodes // n_groups] * n_groups,
            "dirichlet",
            rng,
        )
        corpus = sample_paths(truth, n_paths, 10, rng)
        counts = build_counts(corpus, k_max)
        times = []
        checks = []
        for backend in backends:
            t, val = bench_scoring(counts, 4, n_cand, backend)
            times.append(t)
            checks.append(val)
        assert all(abs(c - checks[0]) < 1e-6 for c in checks), "backends disagree"
        row = " ".join(f"{t:>11.3f}s" for t in times)
        speedup = f"{times[0] / times[-1]:.1f}x" if len(times) > 1 else "-"
        print(f"{label:<44} {row}  {speedup}")

    # one full exhaustive search per backend
    rng = np.random.default_rng(11)
    truth = assemble_truth(make_random_mon(3, 2, rng), [3, 3, 3], "dirichlet", rng)
    corpus = sample_paths(truth, 10**4, 10, rng)
    counts = build_counts(corpus, 3)
    times = []
    for backend in backends:
        t, found = timed(lambda b=backend: exhaustive_search(counts, 4, backend=b), repeat=1)
        times.append(t)
    row = " ".join(f"{t:>11.3f}s" for t in times)
    speedup = f"{times[0] / times[-1]:.1f}x" if len(times) > 1 else "-"
    label = "exhaustive search, 11051 partitions, k_max=3"
    print(f"{label:<44} {row}  {speedup}")


if __name__ == "__main__":
    main()
