"""Joint scoring of a partition: emission evidence + multi-order group dynamics.

`PartitionScorer` is the fast path used by the searches: node-level count
arrays are fixed once, and each candidate partition costs one relabeling
scan per layer plus small dense-table evidence sums. `score_partition` is
the one-shot public wrapper. Both agree exactly with the sparse operations
in `dynamics`/`emission` (tested), which remain the readable reference.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .corpus import Partition
from .counting import LayeredCounts, aggregate_counts
from .dynamics import (
    BF_VERY_STRONG,
    MonPosterior,
    SuccessorSet,
    ladder_select,
    mon_log_marginal,
    mon_posterior,
)
from .emission import EmissionPosterior, emission_log_marginal, emission_posterior
from .kernels import get_backend

logger = logging.getLogger(__name__)

# above this dense-table size the scorer falls back to sparse aggregation
DENSE_TABLE_LIMIT = 1 << 22


@dataclass(frozen=True)
class ScoreBreakdown:
    """Evidence of one partition at every order plus the ladder selection."""

    emission: float
    dynamics: np.ndarray  # log evidence of the group dynamics per order
    order: int

    @property
    def per_order(self) -> np.ndarray:
        return self.emission + self.dynamics

    @property
    def log_marginal(self) -> float:
        return float(self.emission + self.dynamics[self.order])


@dataclass(frozen=True)
class ScoredPartition:
    """A partition with its selected order and log marginal likelihood."""

    partition: Partition
    order: int
    log_marginal: float
    per_order: np.ndarray
    emission: float
    dynamics: np.ndarray

    def __repr__(self) -> str:
        return (
            f"ScoredPartition(groups={self.partition.n_effective}, order={self.order}, "
            f"log_marginal={self.log_marginal:.3f})"
        )


class PartitionScorer:
    """Scores candidate partitions against fixed node-level counts.

    The corpus is never revisited: group counts come from relabeling the
    unique node-level entries, and per-order tails from suffix-summing the
    dense group tables. Instances are cheap to query repeatedly; the searches
    create one per run.
    """

    def __init__(
        self,
        node_counts: LayeredCounts,
        n_labels: int,
        constraint_pairs: Optional[np.ndarray] = None,
        bf_threshold: float = BF_VERY_STRONG,
        backend=None,
    ):
        if n_labels < 1:
            raise ValueError("n_labels must be >= 1")
        self.node_counts = node_counts
        self.n_labels = int(n_labels)
        self.k_max = node_counts.max_order
        self.bf_threshold = float(bf_threshold)
        self.constraint_pairs = constraint_pairs
        self._kern = get_backend() if backend is None else get_backend(backend)

        self._occ = node_counts.occurrence
        self._occ_f = self._occ.astype(np.float64)
        self._emission_const = float(gammaln(self._occ + 1.0).sum())

        self._layers = []
        for width, _, layer in node_counts.layers():
            self._layers.append(
                (
                    width,
                    np.ascontiguousarray(layer.hists, dtype=np.int32),
                    np.ascontiguousarray(layer.succs, dtype=np.int32),
                    np.ascontiguousarray(layer.counts, dtype=np.int64),
                )
            )
        self.dense = self.n_labels ** (self.k_max + 1) <= DENSE_TABLE_LIMIT
        if self.dense:
            self._tables = [
                np.zeros(self.n_labels ** (width + 1), dtype=np.int64)
                for width, _, _, _ in self._layers
            ]
        else:
            logger.info(
                "dense tables for n_labels=%d, k_max=%d exceed the limit; "
                "using sparse scoring",
                self.n_labels,
                self.k_max,
            )

    # -- emission ---------------------------------------------------------

    def emission_log_marginal(self, labels: np.ndarray) -> float:
        sizes = np.bincount(labels, minlength=self.n_labels)
        mass = np.bincount(labels, weights=self._occ_f, minlength=self.n_labels)
        nz = sizes > 0
        s = sizes[nz].astype(np.float64)
        return self._emission_const + float((gammaln(s) - gammaln(s + mass[nz])).sum())

    # -- dynamics ---------------------------------------------------------

    def _succ_sizes(self, labels: np.ndarray):
        """(effective group count, per-last-group sizes or None)."""
        n_eff = int((np.bincount(labels, minlength=self.n_labels) > 0).sum())
        if self.constraint_pairs is None:
            return n_eff, None
        allowed = np.zeros((self.n_labels, self.n_labels), dtype=bool)
        pairs = self.constraint_pairs
        if pairs.size:
            allowed[labels[pairs[:, 0]], labels[pairs[:, 1]]] = True
        return n_eff, allowed.sum(axis=1).astype(np.int64)

    def dynamics_log_marginals(self, labels: np.ndarray) -> np.ndarray:
        """Log evidence of the group dynamics at every order 0..k_max."""
        if not self.dense:
            return self._dynamics_sparse(labels)
        n = self.n_labels
        kern = self._kern
        for (width, hists, succs, counts), table in zip(self._layers, self._tables):
            table.fill(0)
            kern.accumulate_layer(hists, succs, counts, labels, n, table)
        n_eff, sizes = self._succ_sizes(labels)

        exact_ev = [
            kern.layer_evidence(self._tables[j], n, j, float(n_eff), sizes)
            for j in range(self.k_max)
        ]
        out = np.empty(self.k_max + 1)
        prefix = 0.0
        for k in range(self.k_max + 1):
            tail = np.zeros(n ** (k + 1), dtype=np.int64)
            for j in range(k, self.k_max + 1):
                tail += self._tables[j].reshape(n ** (j - k), -1).sum(axis=0)
            out[k] = prefix + kern.layer_evidence(tail, n, k, float(n_eff), sizes)
            if k < self.k_max:
                prefix += exact_ev[k]
        return out

    def _dynamics_sparse(self, labels: np.ndarray) -> np.ndarray:
        part = Partition(labels.copy(), self.n_labels)
        grouped = aggregate_counts(self.node_counts, part)
        succ = SuccessorSet.from_partition(part, self.constraint_pairs)
        return np.array(
            [mon_log_marginal(grouped, k, succ) for k in range(self.k_max + 1)]
        )

    # -- combined ---------------------------------------------------------

    def breakdown(self, labels: np.ndarray, fixed_order: Optional[int] = None) -> ScoreBreakdown:
        labels = np.ascontiguousarray(labels, dtype=np.int32)
        dyn = self.dynamics_log_marginals(labels)
        if fixed_order is None:
            order = ladder_select(dyn, self.bf_threshold).selected_order
        else:
            if not 0 <= fixed_order <= self.k_max:
                raise ValueError(f"fixed order {fixed_order} outside 0..{self.k_max}")
            order = int(fixed_order)
        return ScoreBreakdown(self.emission_log_marginal(labels), dyn, order)

    def log_marginal(self, labels: np.ndarray, fixed_order: Optional[int] = None) -> float:
        return self.breakdown(labels, fixed_order).log_marginal


def score_partition(
    node_counts: LayeredCounts,
    partition: Partition,
    k_max: Optional[int] = None,
    *,
    constraint_pairs: Optional[np.ndarray] = None,
    bf_threshold: float = BF_VERY_STRONG,
    fixed_order: Optional[int] = None,
    backend=None,
) -> ScoredPartition:
    """Aggregate counts under the partition and score it.

    The returned log marginal likelihood is the emission evidence plus the
    group-dynamics evidence at the ladder-selected order (or at `fixed_order`
    when given; the per-order table always covers 0..k_max).
    """
    if k_max is None:
        k_max = node_counts.max_order
    if k_max > node_counts.max_order:
        raise ValueError(
            f"k_max {k_max} exceeds the counts' max_order {node_counts.max_order}"
        )
    counts = node_counts
    if k_max < node_counts.max_order:
        from .counting import project_to_order

        counts = project_to_order(node_counts, k_max)
    scorer = PartitionScorer(
        counts, partition.n_labels, constraint_pairs, bf_threshold, backend
    )
    b = scorer.breakdown(partition.labels, fixed_order)
    return ScoredPartition(
        partition, b.order, b.log_marginal, b.per_order, b.emission, b.dynamics
    )


@dataclass(frozen=True)
class HogModel:
    """A fitted joint model: partition, emission and group dynamics.

    `emission`/`dynamics` hold posterior concentrations fitted from counts;
    `true_emission`/`true_dynamics` optionally hold explicit parameter tables
    (e.g. from a generator) for likelihood evaluation at given parameters.
    """

    partition: Partition
    order: int
    emission: Optional[EmissionPosterior] = None
    dynamics: Optional[MonPosterior] = None
    true_emission: Optional[tuple] = None  # per group: probs over member nodes
    true_dynamics: Optional[tuple] = None  # per layer k: array of shape (n,)*(k+1)


def fit_hog(
    node_counts: LayeredCounts,
    partition: Partition,
    order: int,
    constraint_pairs: Optional[np.ndarray] = None,
) -> HogModel:
    """Posterior emission + dynamics at the given order for a fixed partition."""
    grouped = aggregate_counts(node_counts, partition)
    succ = SuccessorSet.from_partition(partition, constraint_pairs)
    return HogModel(
        partition,
        int(order),
        emission_posterior(node_counts.occurrence, partition),
        mon_posterior(grouped, order, succ),
    )


def hog_path_log_likelihood(model: HogModel, path, mode: str = "posterior-mean") -> float:
    """Log probability of one node path under the joint model.

    posterior-mean mode reads normalized posterior concentrations;
    given-parameters mode reads the explicit tables. A transition to a group
    outside the permitted successor set yields -inf.
    """
    path = np.asarray(path, dtype=np.int64)
    if path.ndim != 1 or path.size < 1:
        raise ValueError("path must be a non-empty index sequence")
    labels = model.partition.labels
    if path.max() >= labels.size or path.min() < 0:
        raise ValueError("path refers to a node outside the partition")
    groups = labels[path]
    k = model.order

    if mode == "posterior-mean":
        if model.emission is None or model.dynamics is None:
            raise ValueError("model has no fitted posterior")
        node_logp = model.emission.node_log_probs()
        total = float(node_logp[path].sum())
        for i, g in enumerate(groups):
            hist = tuple(groups[max(0, i - k) : i]) if i >= k else tuple(groups[:i])
            members, probs = model.dynamics.predictive(hist)
            pos = np.searchsorted(members, g)
            if pos >= members.size or members[pos] != g:
                logger.warning(
                    "transition to group %d after history %s is not permitted", g, hist
                )
                return -math.inf
            total += math.log(probs[pos])
        return total

    if mode == "given-parameters":
        if model.true_emission is None or model.true_dynamics is None:
            raise ValueError("model carries no explicit parameter tables")
        total = 0.0
        for v, g in zip(path, groups):
            nodes, probs = model.true_emission[int(g)]
            pos = np.searchsorted(nodes, v)
            if pos >= len(nodes) or nodes[pos] != v or probs[pos] <= 0.0:
                return -math.inf
            total += math.log(probs[pos])
        n = model.partition.n_labels
        for i, g in enumerate(groups):
            layer = model.true_dynamics[min(i, k)]
            hist = groups[max(0, i - k) : i] if i >= k else groups[:i]
            p = float(layer.reshape(-1, n)[_hist_key(hist, n), int(g)])
            if p <= 0.0:
                logger.warning(
                    "transition to group %d after history %s has probability 0",
                    g,
                    tuple(hist),
                )
                return -math.inf
            total += math.log(p)
        return total

    raise ValueError(f"unknown mode {mode!r}")


def _hist_key(hist, n: int) -> int:
    key = 0
    for g in hist:
        key = key * n + int(g)
    return key
