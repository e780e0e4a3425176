"""Dirichlet-multinomial emission model: which node a group emits.

Each group owns an independent categorical distribution over its member
nodes with a flat Dirichlet(1) prior, so posterior and marginal likelihood
are analytic. All log-Beta values go through log-gamma sums; no factorial
tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import gammaln

from .corpus import Partition
from .errors import UnassignedNodeError


def _check_sizes(occurrence, partition: Partition) -> np.ndarray:
    if isinstance(occurrence, Mapping):
        dense = np.zeros(partition.labels.size, dtype=np.int64)
        for sym, count in occurrence.items():
            dense[int(sym)] = int(count)
        occurrence = dense
    occurrence = np.asarray(occurrence, dtype=np.int64)
    if occurrence.size != partition.labels.size:
        raise UnassignedNodeError(
            f"occurrence covers {occurrence.size} symbols but the partition "
            f"assigns {partition.labels.size}"
        )
    return occurrence


def emission_log_marginal(occurrence, partition: Partition) -> float:
    """Log marginal likelihood of the node occurrence counts given the grouping.

    Equals sum_g [logB(1 + counts of group g) - logB(ones)]; empty groups
    contribute zero, singleton groups emit with probability one.
    """
    occurrence = _check_sizes(occurrence, partition)
    sizes = partition.group_sizes()
    mass = np.zeros(partition.n_labels, dtype=np.int64)
    np.add.at(mass, partition.labels, occurrence)
    nz = sizes > 0
    per_node = float(gammaln(occurrence + 1.0).sum())
    s = sizes[nz].astype(np.float64)
    return per_node + float((gammaln(s) - gammaln(s + mass[nz])).sum())


@dataclass(frozen=True)
class EmissionPosterior:
    """Posterior Dirichlet concentrations per group, alpha = 1 + count."""

    groups: dict  # label -> (member node indices, concentration vector)

    def alpha(self, label: int) -> tuple:
        return self.groups[label]

    def predictive(self, label: int) -> tuple:
        """(member nodes, posterior-mean emission probabilities)."""
        nodes, alphas = self.groups[label]
        return nodes, alphas / alphas.sum()

    def node_log_probs(self) -> np.ndarray:
        """log posterior-mean emission probability indexed by node."""
        n = sum(nodes.size for nodes, _ in self.groups.values())
        out = np.full(n, -np.inf)
        for nodes, alphas in self.groups.values():
            out[nodes] = np.log(alphas / alphas.sum())
        return out


def emission_posterior(occurrence, partition: Partition) -> EmissionPosterior:
    """Per-group posterior concentrations: the flat prior plus the counts."""
    occurrence = _check_sizes(occurrence, partition)
    groups = {}
    for g in partition.effective_labels():
        nodes = np.flatnonzero(partition.labels == g).astype(np.int32)
        groups[int(g)] = (nodes, 1.0 + occurrence[nodes].astype(np.float64))
    return EmissionPosterior(groups)
