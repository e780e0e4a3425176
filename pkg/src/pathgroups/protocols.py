"""Reusable drivers for the synthetic experiment protocols.

These back the `replicate` CLI command and the acceptance suite so both run
the same code: planted communities/roles recovered by exhaustive search,
random multi-order dynamics of a given order, fixed-order comparisons and
optimization away from a misaligned starting partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corpus import Partition
from .counting import build_counts
from .evaluate import ami, compare_fixed_orders, optimize_from_labels
from .search import MhConfig, exhaustive_search
from .synthetic import (
    assemble_truth,
    make_community_dynamics,
    make_random_mon,
    make_role_dynamics,
    sample_paths,
)


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for a named position in the experiment tree."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


@dataclass(frozen=True)
class ReplicateResult:
    replicate: int
    ami: float
    selected_order: int
    log_marginal: float
    n_paths: int
    escalated: bool

    def recovered(self, true_order: int) -> bool:
        return self.ami == 1.0 and self.selected_order == true_order


def _run_exhaustive_replicate(
    truth, n_paths: int, length: int, k_max: int, max_groups: int, rng
) -> tuple:
    corpus = sample_paths(truth, n_paths, length, rng)
    counts = build_counts(corpus, k_max)
    best = exhaustive_search(counts, max_groups)
    return best, ami(best.partition, truth.partition)


def run_planted_block_replicates(
    kind: str,
    n_replicates: int,
    seed: int,
    *,
    n_groups: int = 3,
    nodes_per_group: int = 3,
    p_in: float = 0.70,
    p_stay: float = 0.10,
    n_paths: int = 500,
    length: int = 10,
    k_max: int = 2,
    max_groups: int = 4,
) -> list:
    """Replicates of the planted community/role protocol with exhaustive search."""
    if kind == "communities":
        layers = make_community_dynamics(n_groups, p_in)
    elif kind == "roles":
        layers = make_role_dynamics(n_groups, p_stay)
    else:
        raise ValueError(f"unknown planted kind {kind!r}")
    results = []
    for rep in range(n_replicates):
        truth = assemble_truth(
            layers, [nodes_per_group] * n_groups, "uniform", substream(seed, rep, 0)
        )
        best, score = _run_exhaustive_replicate(
            truth, n_paths, length, k_max, max_groups, substream(seed, rep, 1)
        )
        results.append(
            ReplicateResult(rep, score, best.order, best.log_marginal, n_paths, False)
        )
    return results


def run_random_mon_replicates(
    true_order: int,
    n_replicates: int,
    seed: int,
    *,
    n_groups: int = 3,
    nodes_per_group: int = 3,
    n_paths: int = 10**4,
    escalation_paths: Optional[int] = 10**5,
    length: int = 10,
    k_max: int = 3,
    max_groups: int = 4,
) -> list:
    """Replicates of the random multi-order protocol (exhaustive recovery).

    A replicate that misses the planted partition or order at `n_paths` is
    retried once with `escalation_paths` paths from the same ground truth.
    """
    results = []
    for rep in range(n_replicates):
        gen = substream(seed, rep, 0)
        layers = make_random_mon(n_groups, true_order, gen)
        truth = assemble_truth(layers, [nodes_per_group] * n_groups, "dirichlet", gen)
        best, score = _run_exhaustive_replicate(
            truth, n_paths, length, k_max, max_groups, substream(seed, rep, 1)
        )
        escalated = False
        used = n_paths
        if escalation_paths and not (score == 1.0 and best.order == true_order):
            best, score = _run_exhaustive_replicate(
                truth, escalation_paths, length, k_max, max_groups, substream(seed, rep, 2)
            )
            escalated = True
            used = escalation_paths
        results.append(
            ReplicateResult(rep, score, best.order, best.log_marginal, used, escalated)
        )
    return results


def run_fixed_order_comparison(
    seed: int,
    *,
    true_order: int = 2,
    orders: tuple = (1, 2),
    n_groups: int = 3,
    nodes_per_group: int = 3,
    n_paths: int = 5000,
    length: int = 10,
    runs: int = 5,
    iterations: int = 2000,
    max_groups: int = 4,
) -> dict:
    """Best MH score per fixed order on one random-MON corpus."""
    gen = substream(seed, 0)
    truth = assemble_truth(
        make_random_mon(n_groups, true_order, gen),
        [nodes_per_group] * n_groups,
        "dirichlet",
        gen,
    )
    corpus = sample_paths(truth, n_paths, length, substream(seed, 1))
    counts = build_counts(corpus, max(orders))
    config = MhConfig(
        n_labels=max_groups,
        iterations=iterations,
        seed=int(substream(seed, 2).integers(2**32)),
        k_max=max(orders),
        scoring="fixed",
        fixed_order=orders[0],
    )
    return compare_fixed_orders(counts, orders[0], orders[1], config, runs=runs)


def run_from_labels(
    seed: int,
    *,
    n_groups: int = 3,
    nodes_per_group: int = 3,
    n_paths: int = 2000,
    length: int = 10,
    iterations: int = 1000,
    k_max: int = 2,
    max_groups: int = 4,
) -> dict:
    """Start MH from labels misaligned with the corpus optimum (planted
    communities, scrambled starting labels); returns the trace and both
    partitions."""
    gen = substream(seed, 0)
    truth = assemble_truth(
        make_community_dynamics(n_groups, 0.85),
        [nodes_per_group] * n_groups,
        "uniform",
        gen,
    )
    corpus = sample_paths(truth, n_paths, length, substream(seed, 1))
    counts = build_counts(corpus, k_max)
    # deliberately misaligned start: stripe the labels across planted groups
    start = Partition(
        np.arange(counts.n_symbols, dtype=np.int32) % n_groups, max_groups
    )
    config = MhConfig(
        n_labels=max_groups,
        iterations=iterations,
        seed=int(substream(seed, 2).integers(2**32)),
        k_max=k_max,
    )
    best, trace = optimize_from_labels(counts, start, config)
    return {
        "best": best,
        "trace": trace,
        "start": start,
        "truth": truth.partition,
        "counts": counts,
    }
