"""Layered transition counting for pathway data.

A model of maximum order K splits a path (v_0, ..., v_l) into positions:
position i < K is counted in exact layer i under the full prefix
(v_0, ..., v_{i-1}); positions i >= K are pooled in the tail layer under the
trailing window (v_{i-K}, ..., v_{i-1}). Exact layer 0 therefore holds path
starts. A standalone order-0 structure has no exact layers and its tail (the
empty history) covers every position, so its counts equal the occurrence
counts.

Counting passes over the corpus exactly once; counts for any lower order are
recovered by suffix truncation (`project_to_order`), and group-level counts
by relabeling node indices (`aggregate_counts`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Partition, PathCorpus
from .errors import ConstraintViolationError, UnassignedNodeError


def _empty_entries(width: int):
    return (
        np.empty((0, width), dtype=np.int32),
        np.empty(0, dtype=np.int32),
        np.empty(0, dtype=np.int64),
    )


def merge_entries(width: int, blocks: Sequence) -> tuple:
    """Sum weighted (history, successor) entries into sorted unique rows.

    Each block is a (hists, succs, weights) triple; rows are sorted
    lexicographically by history then successor. Weight sums stay exact
    because total count mass is far below 2**53.
    """
    blocks = [b for b in blocks if b[1].size]
    if not blocks:
        return _empty_entries(width)
    if len(blocks) == 1:
        hists, succs, weights = blocks[0]
    else:
        hists = np.concatenate([b[0] for b in blocks], axis=0)
        succs = np.concatenate([b[1] for b in blocks])
        weights = np.concatenate([b[2] for b in blocks])
    hists = np.ascontiguousarray(hists, dtype=np.int32)
    succs = np.asarray(succs, dtype=np.int32)
    # lexsort uses the last key as primary, so feed columns right-to-left
    keys = [succs] + [hists[:, c] for c in range(width - 1, -1, -1)]
    order = np.lexsort(tuple(keys))
    hists = hists[order]
    succs = succs[order]
    weights = np.asarray(weights, dtype=np.float64)[order]
    if succs.size == 1:
        new = np.zeros(0, dtype=bool)
    else:
        new = succs[1:] != succs[:-1]
        if width:
            new |= np.any(hists[1:] != hists[:-1], axis=1)
    seg = np.concatenate([[0], np.cumsum(new)])
    sums = np.bincount(seg, weights=weights)
    firsts = np.concatenate([[0], np.flatnonzero(new) + 1])
    counts = np.rint(sums).astype(np.int64)
    return np.ascontiguousarray(hists[firsts]), succs[firsts], counts


@dataclass(frozen=True, eq=False)
class CountLayer:
    """Unique (history, successor) rows with counts, sorted lexicographically.

    `order` is the history length; histories occupy contiguous row ranges so
    per-history successor vectors can be scanned without hashing.
    """

    order: int
    hists: np.ndarray
    succs: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        for a in (self.hists, self.succs, self.counts):
            a.flags.writeable = False

    @property
    def n_entries(self) -> int:
        return int(self.succs.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def as_dict(self) -> dict:
        out: dict = {}
        for h, s, c in zip(self.hists, self.succs, self.counts):
            out.setdefault(tuple(int(x) for x in h), {})[int(s)] = int(c)
        return out

    def history_slices(self) -> tuple:
        """(start-row indices of each distinct history, one-past-end indices)."""
        n = self.n_entries
        if n == 0:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        if self.order == 0:
            starts = np.array([0], dtype=np.int64)
        else:
            new = np.any(self.hists[1:] != self.hists[:-1], axis=1)
            starts = np.concatenate([[0], np.flatnonzero(new) + 1]).astype(np.int64)
        ends = np.concatenate([starts[1:], [n]]).astype(np.int64)
        return starts, ends

    def equals(self, other: "CountLayer") -> bool:
        return (
            self.order == other.order
            and np.array_equal(self.hists, other.hists)
            and np.array_equal(self.succs, other.succs)
            and np.array_equal(self.counts, other.counts)
        )


@dataclass(frozen=True, eq=False)
class LayeredCounts:
    """Per-layer transition counts plus symbol occurrence totals.

    Immutable after construction; safe to share between concurrent readers.
    Works both at node level (symbols = node indices) and, after
    `aggregate_counts`, at group level (symbols = group labels).
    """

    n_symbols: int
    max_order: int
    exact: tuple
    tail: CountLayer
    occurrence: np.ndarray
    n_paths: int

    def __post_init__(self):
        self.occurrence.flags.writeable = False

    def layers(self) -> list:
        """All layers as (history length, is_tail, CountLayer)."""
        out = [(k, False, layer) for k, layer in enumerate(self.exact)]
        out.append((self.max_order, True, self.tail))
        return out

    def total_transitions(self) -> int:
        return sum(layer.total for _, _, layer in self.layers())

    def equals(self, other: "LayeredCounts") -> bool:
        return (
            self.n_symbols == other.n_symbols
            and self.max_order == other.max_order
            and self.n_paths == other.n_paths
            and np.array_equal(self.occurrence, other.occurrence)
            and all(a.equals(b) for a, b in zip(self.exact, other.exact))
            and self.tail.equals(other.tail)
        )

    def __repr__(self) -> str:
        return (
            f"LayeredCounts(symbols={self.n_symbols}, max_order={self.max_order}, "
            f"paths={self.n_paths}, entries={[l.n_entries for _, _, l in self.layers()]})"
        )


def _check_constraint(corpus: PathCorpus) -> None:
    pairs = corpus.constraint_pairs()
    if pairs is None:
        return
    adj = np.zeros((corpus.n_nodes, corpus.n_nodes), dtype=bool)
    if pairs.size:
        adj[pairs[:, 0], pairs[:, 1]] = True
    for p_idx, path in enumerate(corpus.paths):
        if path.size < 2:
            continue
        ok = adj[path[:-1], path[1:]]
        if not ok.all():
            i = int(np.flatnonzero(~ok)[0])
            a, b = corpus.tokens[path[i]], corpus.tokens[path[i + 1]]
            raise ConstraintViolationError(
                f"path {p_idx} contains transition {a!r} -> {b!r} "
                f"which is not an edge of the graph constraint"
            )


def build_counts(corpus: PathCorpus, k_max: int) -> LayeredCounts:
    """Count the corpus once into exact layers 0..k_max-1 plus the tail layer.

    Raises ConstraintViolationError when a path violates an attached graph
    constraint, identifying the offending transition.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    _check_constraint(corpus)
    V = corpus.n_nodes
    occurrence = np.zeros(V, dtype=np.int64)

    # paths grouped by length so each group counts via array windows
    by_len: dict = {}
    for p in corpus.paths:
        by_len.setdefault(p.size, []).append(p)

    exact_blocks: list = [[] for _ in range(k_max)]
    tail_blocks: list = []
    for size, group in sorted(by_len.items()):
        mat = np.vstack(group) if len(group) > 1 else group[0][None, :]
        occurrence += np.bincount(mat.ravel(), minlength=V)
        m = mat.shape[0]
        ones = np.ones(m, dtype=np.int64)
        for i in range(min(k_max, size)):
            exact_blocks[i].append((mat[:, :i], mat[:, i], ones))
        for i in range(k_max, size):
            tail_blocks.append((mat[:, i - k_max : i], mat[:, i], ones))

    exact = tuple(
        CountLayer(i, *merge_entries(i, exact_blocks[i])) for i in range(k_max)
    )
    tail = CountLayer(k_max, *merge_entries(k_max, tail_blocks))
    return LayeredCounts(V, k_max, exact, tail, occurrence, corpus.n_paths)


def aggregate_counts(node_counts: LayeredCounts, partition: Partition) -> LayeredCounts:
    """Group-level counts: sum node counts whose symbols map to the same labels."""
    labels = partition.labels
    if labels.size != node_counts.n_symbols:
        raise UnassignedNodeError(
            f"partition covers {labels.size} nodes but counts have "
            f"{node_counts.n_symbols} symbols"
        )
    n_g = partition.n_labels

    def remap(layer: CountLayer) -> CountLayer:
        hists = labels[layer.hists] if layer.order else layer.hists.copy()
        return CountLayer(
            layer.order,
            *merge_entries(layer.order, [(hists, labels[layer.succs], layer.counts)]),
        )

    occurrence = np.zeros(n_g, dtype=np.int64)
    np.add.at(occurrence, labels, node_counts.occurrence)
    return LayeredCounts(
        n_g,
        node_counts.max_order,
        tuple(remap(l) for l in node_counts.exact),
        remap(node_counts.tail),
        occurrence,
        node_counts.n_paths,
    )


def project_to_order(counts: LayeredCounts, k: int) -> LayeredCounts:
    """Counts as if built with max_order = k <= counts.max_order.

    Exact layers below k are copied; the new tail pools the length-k suffixes
    of every higher exact layer and of the old tail.
    """
    if not 0 <= k <= counts.max_order:
        raise ValueError(f"order {k} outside 0..{counts.max_order}")
    if k == counts.max_order:
        return counts
    blocks = []
    for j in range(k, counts.max_order):
        layer = counts.exact[j]
        blocks.append((layer.hists[:, j - k :], layer.succs, layer.counts))
    old_tail = counts.tail
    blocks.append((old_tail.hists[:, counts.max_order - k :], old_tail.succs, old_tail.counts))
    tail = CountLayer(k, *merge_entries(k, blocks))
    return LayeredCounts(
        counts.n_symbols, k, counts.exact[:k], tail, counts.occurrence, counts.n_paths
    )
