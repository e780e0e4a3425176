"""Multi-order group dynamics: per-history Dirichlet-multinomial inference.

Layer k of a maximum-order-K model conditions the k-th step of a path on its
full prefix (k < K); the tail layer pools all later steps under the trailing
K groups. Every history owns an independent flat-prior Dirichlet over its
permitted successors, so evidence and posterior are analytic, and order
selection is a ladder of Bayes-factor tests between consecutive orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .corpus import Partition
from .counting import CountLayer, LayeredCounts, project_to_order
from .errors import ConstraintViolationError

BF_VERY_STRONG = 150.0


@dataclass(frozen=True)
class SuccessorSet:
    """Permitted successor groups per history.

    Unconstrained: every history (including the empty one) may be followed by
    any label with at least one member. Under a graph constraint the
    permitted set depends only on the last history element: the groups
    reachable from it through at least one node-level edge.
    """

    n_labels: int
    effective: np.ndarray
    allowed: Optional[np.ndarray]  # (n_labels, n_labels) bool, None = unconstrained

    @classmethod
    def from_partition(
        cls, partition: Partition, constraint_pairs: Optional[np.ndarray] = None
    ) -> "SuccessorSet":
        effective = partition.effective_labels()
        if constraint_pairs is None:
            return cls(partition.n_labels, effective, None)
        allowed = np.zeros((partition.n_labels, partition.n_labels), dtype=bool)
        if constraint_pairs.size:
            src = partition.labels[constraint_pairs[:, 0]]
            dst = partition.labels[constraint_pairs[:, 1]]
            allowed[src, dst] = True
        return cls(partition.n_labels, effective, allowed)

    def members(self, hist: tuple) -> np.ndarray:
        if self.allowed is None or len(hist) == 0:
            return self.effective
        return np.flatnonzero(self.allowed[hist[-1]]).astype(np.int32)

    def size(self, hist: tuple) -> int:
        return int(self.members(hist).size)

    def sizes_by_last(self) -> Optional[np.ndarray]:
        """Successor-set size per last history element; None when uniform."""
        if self.allowed is None:
            return None
        return self.allowed.sum(axis=1).astype(np.int64)

    def contains(self, hist: tuple, g: int) -> bool:
        if self.allowed is None or len(hist) == 0:
            return bool(np.isin(g, self.effective))
        return bool(self.allowed[hist[-1], g])


def _layer_log_evidence(layer: CountLayer, succ: SuccessorSet) -> float:
    """Log evidence contribution of one layer; unobserved histories add zero."""
    if layer.n_entries == 0:
        return 0.0
    _validate_layer(layer, succ)
    total = float(gammaln(layer.counts + 1.0).sum())
    starts, ends = layer.history_slices()
    mass = np.add.reduceat(layer.counts, starts)
    if layer.order == 0 or succ.allowed is None:
        sizes = np.full(starts.size, float(succ.effective.size))
    else:
        sizes = succ.sizes_by_last()[layer.hists[starts, -1]].astype(np.float64)
    return total + float((gammaln(sizes) - gammaln(sizes + mass)).sum())


def _validate_layer(layer: CountLayer, succ: SuccessorSet) -> None:
    if succ.allowed is None or layer.order == 0:
        ok = np.isin(layer.succs, succ.effective)
    else:
        ok = succ.allowed[layer.hists[:, -1], layer.succs]
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        hist = tuple(int(x) for x in layer.hists[i])
        raise ConstraintViolationError(
            f"observed successor {int(layer.succs[i])} of history {hist} "
            f"is outside the permitted successor set"
        )


def mon_log_marginal(group_counts: LayeredCounts, k: int, succ: SuccessorSet) -> float:
    """Analytic log marginal likelihood of the order-k group dynamics."""
    counts = project_to_order(group_counts, k)
    total = 0.0
    for _, _, layer in counts.layers():
        total += _layer_log_evidence(layer, succ)
    return total


@dataclass(frozen=True)
class OrderSelectionResult:
    """Ladder of Bayes-factor tests between consecutive orders."""

    selected_order: int
    log_marginals: np.ndarray  # per order 0..k_max
    log_bayes_factors: np.ndarray  # step k -> k+1
    accepted: np.ndarray  # whether each step clears the threshold
    bf_threshold: float

    def __post_init__(self):
        for a in (self.log_marginals, self.log_bayes_factors, self.accepted):
            a.flags.writeable = False


def ladder_select(log_marginals: np.ndarray, bf_threshold: float) -> OrderSelectionResult:
    """Walk the order ladder from 0, accepting k+1 while log BF > log(threshold)."""
    lm = np.asarray(log_marginals, dtype=np.float64)
    diffs = lm[1:] - lm[:-1]
    accepted = diffs > math.log(bf_threshold)
    k = 0
    while k < diffs.size and accepted[k]:
        k += 1
    return OrderSelectionResult(k, lm, diffs, accepted, float(bf_threshold))


def select_order(
    group_counts: LayeredCounts,
    k_max: int,
    succ: SuccessorSet,
    bf_threshold: float = BF_VERY_STRONG,
) -> OrderSelectionResult:
    """Evidence at every order 0..k_max plus the ladder decision."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if k_max > group_counts.max_order:
        raise ValueError(
            f"k_max {k_max} exceeds the counts' max_order {group_counts.max_order}"
        )
    lm = np.array(
        [mon_log_marginal(group_counts, k, succ) for k in range(k_max + 1)]
    )
    return ladder_select(lm, bf_threshold)


@dataclass(frozen=True)
class MonPosterior:
    """Posterior concentrations per observed history; alpha = 1 + count.

    Histories that were never observed keep the flat prior, which
    `predictive` reports as a uniform distribution over the successor set.
    """

    order: int
    layers: tuple  # per layer: dict hist tuple -> (successor labels, alphas)
    succ: SuccessorSet

    def concentration(self, hist: tuple) -> tuple:
        k = len(hist)
        if k > self.order:
            raise ValueError(f"history longer than the model order {self.order}")
        entry = self.layers[k].get(tuple(int(x) for x in hist))
        if entry is not None:
            return entry
        members = self.succ.members(hist)
        return members, np.ones(members.size, dtype=np.float64)

    def predictive(self, hist: tuple) -> tuple:
        """(successor labels, posterior-mean transition probabilities)."""
        members, alphas = self.concentration(hist)
        return members, alphas / alphas.sum()


def mon_posterior(group_counts: LayeredCounts, k: int, succ: SuccessorSet) -> MonPosterior:
    counts = project_to_order(group_counts, k)
    layers = []
    for _, _, layer in counts.layers():
        _validate_layer(layer, succ)
        table: dict = {}
        starts, ends = layer.history_slices()
        for s, e in zip(starts, ends):
            hist = tuple(int(x) for x in layer.hists[s])
            members = succ.members(hist)
            alphas = np.ones(members.size, dtype=np.float64)
            pos = np.searchsorted(members, layer.succs[s:e])
            alphas[pos] += layer.counts[s:e]
            table[hist] = (members, alphas)
        layers.append(table)
    return MonPosterior(k, tuple(layers), succ)
