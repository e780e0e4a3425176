"""Shared test helpers: independent oracles and random-instance generators.

The oracles deliberately avoid the library's counting and evidence code:
evidence values come from sequential Polya-urn products, count tables from
plain dict recounts of the paths.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict

import numpy as np
import pytest

from pathgroups import Partition, PathCorpus


# -- random instances ---------------------------------------------------------


def random_corpus(rng, max_nodes=5, max_paths=4, max_transitions=5):
    """Small random corpus; every node appears in the universe."""
    n_nodes = int(rng.integers(1, max_nodes + 1))
    n_paths = int(rng.integers(1, max_paths + 1))
    paths = [
        rng.integers(0, n_nodes, size=int(rng.integers(1, max_transitions + 2)))
        for _ in range(n_paths)
    ]
    tokens = [f"n{i}" for i in range(n_nodes)]
    return PathCorpus(tokens, paths)


def random_partition(rng, n_nodes, max_labels=4):
    n_labels = int(rng.integers(1, max_labels + 1))
    return Partition(rng.integers(0, n_labels, size=n_nodes).astype(np.int32), n_labels)


# -- Polya-urn evidence oracles ------------------------------------------------


def polya_log_prob(sequence, support):
    """Sequential predictive probability of drawing `sequence` from a flat
    Dirichlet over `support`."""
    alpha = {s: 1.0 for s in support}
    total = float(len(support))
    out = 0.0
    for x in sequence:
        out += math.log(alpha[x] / total)
        alpha[x] += 1.0
        total += 1.0
    return out


def emission_oracle(occurrence, partition, rng=None):
    """Emission evidence as a Polya product per group, in arbitrary order."""
    labels = partition.labels
    out = 0.0
    for g in np.unique(labels):
        members = [int(v) for v in np.flatnonzero(labels == g)]
        seq = [v for v in members for _ in range(int(occurrence[v]))]
        if rng is not None:
            rng.shuffle(seq)
        out += polya_log_prob(seq, members)
    return out


def mon_history_events(group_paths, order):
    """Per-history successor draws, pooled exactly as the layered model pools
    them (full prefixes below the order, trailing windows at it)."""
    events = defaultdict(list)
    for path in group_paths:
        for i, g in enumerate(path):
            if i < order:
                hist = tuple(int(x) for x in path[:i])
            else:
                hist = tuple(int(x) for x in path[i - order : i])
            events[hist].append(int(g))
    return events


def mon_oracle(group_paths, order, successor_members):
    """Group-dynamics evidence as a Polya product per observed history.

    `successor_members(hist)` returns the permitted successor labels.
    """
    out = 0.0
    for hist, seq in mon_history_events(group_paths, order).items():
        out += polya_log_prob(seq, [int(g) for g in successor_members(hist)])
    return out


def relabeled_paths(corpus, partition):
    return [partition.labels[p] for p in corpus.paths]


# -- dict recount oracle --------------------------------------------------------


def recount_dicts(paths, k_max):
    """Layer tables as plain dicts, counted directly from the paths."""
    exact = [defaultdict(Counter) for _ in range(k_max)]
    tail = defaultdict(Counter)
    occ = Counter()
    for p in paths:
        p = [int(x) for x in p]
        for i, v in enumerate(p):
            occ[v] += 1
            if i < k_max:
                exact[i][tuple(p[:i])][v] += 1
            else:
                tail[tuple(p[i - k_max : i])][v] += 1
    return [dict((h, dict(c)) for h, c in layer.items()) for layer in exact], dict(
        (h, dict(c)) for h, c in tail.items()
    ), occ


def layered_as_dicts(counts):
    exact = [layer.as_dict() for layer in counts.exact]
    return exact, counts.tail.as_dict(), Counter(
        {i: int(c) for i, c in enumerate(counts.occurrence) if c}
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
