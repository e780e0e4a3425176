"""Partition-space search: exhaustive enumeration and Metropolis-Hastings.

Both searches reuse the node-level counts for every candidate (one corpus
pass total). The MH proposal relabels a single uniformly chosen node to a
uniformly chosen different label, which is symmetric, so the acceptance
probability is just the likelihood ratio clamped to one. The chain is used
as a maximizer: the best partition visited is reported, not the final state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .corpus import Partition
from .counting import CountLayer, LayeredCounts, merge_entries
from .dynamics import BF_VERY_STRONG
from .model import PartitionScorer, ScoredPartition

EXHAUSTIVE_LIMIT = 10**7


# -- set partition enumeration ---------------------------------------------


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind via the standard DP."""
    if k < 0 or k > n:
        return 0
    row = [1] + [0] * k  # S(0, .)
    for _ in range(n):
        new = [0] * (k + 1)
        for j in range(1, k + 1):
            new[j] = row[j - 1] + j * row[j]
        row = new
    return row[k]


def partition_count(n: int, max_blocks: int) -> int:
    """Number of set partitions of n items into at most max_blocks blocks."""
    return sum(stirling2(n, k) for k in range(1, min(n, max_blocks) + 1))


def restricted_growth_strings(n: int, max_blocks: int) -> Iterator[np.ndarray]:
    """All canonical label vectors with at most max_blocks blocks, in lex order.

    A restricted growth string satisfies a[0] = 0 and
    a[i] <= max(a[0..i-1]) + 1, which enumerates each set partition exactly
    once.
    """
    if n < 1 or max_blocks < 1:
        return
    a = np.zeros(n, dtype=np.int32)
    prefix_max = np.zeros(n, dtype=np.int32)  # max of a[0..i-1], with [0] = -1
    prefix_max[0] = -1
    for i in range(1, n):
        prefix_max[i] = max(prefix_max[i - 1], a[i - 1])
    while True:
        yield a.copy()
        i = n - 1
        while i > 0 and a[i] >= min(max_blocks - 1, prefix_max[i] + 1):
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, n):
            a[j] = 0
            prefix_max[j] = max(prefix_max[j - 1], a[j - 1])


# -- Metropolis-Hastings ----------------------------------------------------


@dataclass
class MhConfig:
    """Chain settings; `scoring` is "ladder" (re-select the order per
    candidate) or "fixed" (pin `fixed_order`)."""

    n_labels: int
    iterations: int
    seed: int
    k_max: int
    scoring: str = "ladder"
    fixed_order: Optional[int] = None
    bf_threshold: float = BF_VERY_STRONG

    def __post_init__(self):
        if self.iterations < 1 or self.n_labels < 1:
            raise ValueError("iterations and n_labels must be >= 1")
        if self.scoring not in ("ladder", "fixed"):
            raise ValueError("scoring must be 'ladder' or 'fixed'")
        if self.scoring == "fixed" and self.fixed_order is None:
            raise ValueError("fixed scoring requires fixed_order")

    @property
    def order_arg(self) -> Optional[int]:
        return self.fixed_order if self.scoring == "fixed" else None


@dataclass
class SearchTrace:
    """Per-iteration chain record; best-so-far is non-decreasing."""

    accepted: np.ndarray
    current_log_marginal: np.ndarray
    best_log_marginal: np.ndarray
    ami_vs_reference: Optional[np.ndarray] = None
    n_evaluations: int = 0


def accept_move(delta_log: float, rng: np.random.Generator) -> bool:
    """MH acceptance for a symmetric proposal: certain when the candidate
    scores at least as well, otherwise with probability exp(delta)."""
    if delta_log >= 0.0:
        return True
    return rng.random() < math.exp(delta_log)


def mh_search(
    node_counts: LayeredCounts,
    config: MhConfig,
    init: Optional[Partition] = None,
    *,
    constraint_pairs: Optional[np.ndarray] = None,
    reference: Optional[Partition] = None,
    backend=None,
) -> tuple:
    """Run one MH chain; returns (best ScoredPartition, SearchTrace).

    Deterministic given the seed. When `reference` is given the trace also
    records the AMI between the current partition and the reference after
    every iteration.
    """
    counts = node_counts
    if config.k_max > node_counts.max_order:
        raise ValueError(
            f"k_max {config.k_max} exceeds the counts' max_order {node_counts.max_order}"
        )
    if config.k_max < node_counts.max_order:
        from .counting import project_to_order

        counts = project_to_order(node_counts, config.k_max)
    scorer = PartitionScorer(
        counts, config.n_labels, constraint_pairs, config.bf_threshold, backend
    )
    rng = np.random.default_rng(config.seed)
    n_nodes = node_counts.n_symbols
    if init is not None:
        if init.labels.size != n_nodes:
            raise ValueError("init partition does not cover the corpus nodes")
        if init.labels.size and init.labels.max() >= config.n_labels:
            raise ValueError("init partition uses labels outside the configured range")
        labels = init.labels.astype(np.int32).copy()
    else:
        labels = rng.integers(0, config.n_labels, size=n_nodes, dtype=np.int32)

    fixed = config.order_arg
    cur = scorer.breakdown(labels, fixed)
    cur_score = cur.log_marginal
    best_labels = labels.copy()
    best = cur
    n_evals = 1

    accepted = np.zeros(config.iterations, dtype=bool)
    cur_log = np.empty(config.iterations)
    best_log = np.empty(config.iterations)
    ami_series = np.empty(config.iterations) if reference is not None else None
    if reference is not None:
        from .evaluate import ami as _ami

    for it in range(config.iterations):
        if config.n_labels > 1 and n_nodes > 0:
            v = int(rng.integers(n_nodes))
            old = int(labels[v])
            shifted = int(rng.integers(config.n_labels - 1))
            new = shifted + (shifted >= old)
            labels[v] = new
            cand = scorer.breakdown(labels, fixed)
            n_evals += 1
            if accept_move(cand.log_marginal - cur_score, rng):
                accepted[it] = True
                cur = cand
                cur_score = cand.log_marginal
                if cur_score > best.log_marginal:
                    best = cur
                    best_labels = labels.copy()
            else:
                labels[v] = old
        cur_log[it] = cur_score
        best_log[it] = best.log_marginal
        if reference is not None:
            ami_series[it] = _ami(Partition(labels.copy(), config.n_labels), reference)

    scored = ScoredPartition(
        Partition(best_labels, config.n_labels),
        best.order,
        best.log_marginal,
        best.per_order,
        best.emission,
        best.dynamics,
    )
    trace = SearchTrace(accepted, cur_log, best_log, ami_series, n_evals)
    return scored, trace


# -- exhaustive search ------------------------------------------------------


def exhaustive_search(
    node_counts: LayeredCounts,
    max_groups: int,
    k_max: Optional[int] = None,
    *,
    constraint_pairs: Optional[np.ndarray] = None,
    bf_threshold: float = BF_VERY_STRONG,
    fixed_order: Optional[int] = None,
    backend=None,
) -> ScoredPartition:
    """Score every set partition with at most max_groups blocks.

    Ties are broken toward fewer effective groups, then lower selected order,
    then the lexicographically first restricted growth string (which is the
    enumeration order). Refuses instances with more than 10^7 partitions.
    """
    from .errors import InfeasibleSearchError

    if k_max is None:
        k_max = node_counts.max_order
    n_nodes = node_counts.n_symbols
    total = partition_count(n_nodes, max_groups)
    if total > EXHAUSTIVE_LIMIT:
        raise InfeasibleSearchError(
            f"{total} partitions of {n_nodes} nodes into <= {max_groups} groups "
            f"exceed the {EXHAUSTIVE_LIMIT} limit",
            n_partitions=total,
        )
    counts = node_counts
    if k_max < node_counts.max_order:
        from .counting import project_to_order

        counts = project_to_order(node_counts, k_max)
    scorer = PartitionScorer(counts, max_groups, constraint_pairs, bf_threshold, backend)
    best = None
    best_labels = None
    best_key = None
    for labels in restricted_growth_strings(n_nodes, max_groups):
        b = scorer.breakdown(labels, fixed_order)
        n_eff = int(labels.max()) + 1  # growth strings use labels 0..max contiguously
        key = (-b.log_marginal, n_eff, b.order)
        if best is None or key < best_key:
            best, best_labels, best_key = b, labels, key
    return ScoredPartition(
        Partition(best_labels, max_groups),
        best.order,
        best.log_marginal,
        best.per_order,
        best.emission,
        best.dynamics,
    )


# -- incremental reaggregation ---------------------------------------------


def incremental_rescore(
    current: LayeredCounts,
    move: tuple,
    node_counts: LayeredCounts,
    new_partition: Partition,
) -> LayeredCounts:
    """Group counts after relabeling one node, by delta update.

    `move` is (node, old label, new label); `new_partition` already carries
    the new label. Equals `aggregate_counts(node_counts, new_partition)`
    exactly (integer arithmetic); only entries whose history or successor
    contains the moved node are remapped.
    """
    node, old_label, new_label = move
    labels_new = new_partition.labels
    if int(labels_new[node]) != int(new_label):
        raise ValueError("new_partition does not reflect the move")
    if old_label == new_label:
        return current
    labels_old = labels_new.copy()
    labels_old[node] = old_label

    def update(cur_layer: CountLayer, node_layer: CountLayer) -> CountLayer:
        touches = node_layer.succs == node
        if node_layer.order:
            touches = touches | (node_layer.hists == node).any(axis=1)
        idx = np.flatnonzero(touches)
        if idx.size == 0:
            return cur_layer
        h = node_layer.hists[idx]
        s = node_layer.succs[idx]
        c = node_layer.counts[idx]
        w = node_layer.order
        blocks = [
            (cur_layer.hists, cur_layer.succs, cur_layer.counts),
            (labels_old[h] if w else h, labels_old[s], -c),
            (labels_new[h] if w else h, labels_new[s], c),
        ]
        hists, succs, counts = merge_entries(w, blocks)
        keep = counts != 0
        return CountLayer(w, np.ascontiguousarray(hists[keep]), succs[keep], counts[keep])

    exact = tuple(
        update(cur, node) for cur, node in zip(current.exact, node_counts.exact)
    )
    tail = update(current.tail, node_counts.tail)
    occurrence = current.occurrence.copy()
    occurrence[old_label] -= node_counts.occurrence[node]
    occurrence[new_label] += node_counts.occurrence[node]
    return LayeredCounts(
        current.n_symbols, current.max_order, exact, tail, occurrence, current.n_paths
    )
