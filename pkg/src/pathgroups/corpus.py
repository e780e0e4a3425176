"""Pathway corpora: node vocabulary, paths, graph constraints and partitions.

Node tokens are arbitrary strings; internally every structure works on dense
integer indices 0..|V|-1 assigned by sorting the universe, so that runs are
reproducible regardless of input ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import UnassignedNodeError, UnknownNodeError


@dataclass(frozen=True)
class GraphConstraint:
    """Directed edge set restricting which transitions a path may contain.

    Absence of a constraint means any transition is allowed. Self-loops are
    permitted; edges are unweighted.
    """

    edges: frozenset

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "GraphConstraint":
        return cls(frozenset((str(a), str(b)) for a, b in pairs))

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (str(a), str(b)) in self.edges

    def node_tokens(self) -> set:
        out = set()
        for a, b in self.edges:
            out.add(a)
            out.add(b)
        return out

    def to_index_pairs(self, index: Mapping[str, int]) -> np.ndarray:
        """Edges as an (E, 2) int32 array of node indices."""
        unknown = [t for t in self.node_tokens() if t not in index]
        if unknown:
            raise UnknownNodeError(
                f"constraint mentions nodes outside the corpus universe: {sorted(unknown)[:5]}"
            )
        if not self.edges:
            return np.empty((0, 2), dtype=np.int32)
        pairs = sorted((index[a], index[b]) for a, b in self.edges)
        return np.asarray(pairs, dtype=np.int32)


class PathCorpus:
    """A multiset of node paths over a fixed vocabulary.

    Duplicate paths are kept with their multiplicity. The node universe may
    contain nodes that never occur in any path.
    """

    def __init__(
        self,
        tokens: Sequence[str],
        paths: Sequence[np.ndarray],
        constraint: Optional[GraphConstraint] = None,
    ):
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("node tokens must be unique")
        self.paths = [np.asarray(p, dtype=np.int32) for p in paths]
        if any(p.ndim != 1 or p.size < 1 for p in self.paths):
            raise ValueError("every path must be a non-empty 1-d index sequence")
        if self.paths:
            flat = np.concatenate(self.paths)
            if flat.size and (flat.min() < 0 or flat.max() >= len(self.tokens)):
                raise ValueError("path refers to a node index outside the universe")
        self.constraint = constraint

    @classmethod
    def from_token_paths(
        cls,
        token_paths: Iterable[Sequence[str]],
        universe: Optional[Iterable[str]] = None,
        constraint: Optional[GraphConstraint] = None,
    ) -> "PathCorpus":
        token_paths = [list(map(str, p)) for p in token_paths]
        seen = set()
        for p in token_paths:
            seen.update(p)
        if constraint is not None:
            seen |= constraint.node_tokens()
        if universe is not None:
            universe = set(map(str, universe))
            missing = seen - universe
            if missing:
                raise UnknownNodeError(
                    f"paths mention nodes outside the declared universe: {sorted(missing)[:5]}"
                )
            seen = universe
        tokens = sorted(seen)
        index = {t: i for i, t in enumerate(tokens)}
        paths = [np.asarray([index[t] for t in p], dtype=np.int32) for p in token_paths]
        return cls(tokens, paths, constraint)

    @property
    def n_nodes(self) -> int:
        return len(self.tokens)

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    def token_paths(self) -> list:
        return [[self.tokens[i] for i in p] for p in self.paths]

    def constraint_pairs(self) -> Optional[np.ndarray]:
        """Constraint edges in index space, or None when unconstrained."""
        if self.constraint is None:
            return None
        return self.constraint.to_index_pairs(self.index)

    def __repr__(self) -> str:
        c = "constrained" if self.constraint is not None else "unconstrained"
        return f"PathCorpus(nodes={self.n_nodes}, paths={self.n_paths}, {c})"


class Partition:
    """A total map from node indices to group labels in {0..n_labels-1}.

    Empty labels are permitted; the effective group count is the number of
    labels with at least one member.
    """

    def __init__(self, labels, n_labels: int):
        labels = np.asarray(labels, dtype=np.int32)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if n_labels < 1:
            raise ValueError("n_labels must be >= 1")
        if labels.size:
            bad = np.flatnonzero((labels < 0) | (labels >= n_labels))
            if bad.size:
                raise UnassignedNodeError(
                    f"node index {int(bad[0])} has label {int(labels[bad[0]])} "
                    f"outside 0..{n_labels - 1}"
                )
        self.labels = labels
        self.labels.flags.writeable = False
        self.n_labels = int(n_labels)

    @classmethod
    def from_dict(
        cls, mapping: Mapping[str, int], corpus: PathCorpus, n_labels: Optional[int] = None
    ) -> "Partition":
        missing = [t for t in corpus.tokens if t not in mapping]
        if missing:
            raise UnassignedNodeError(f"nodes without a label: {missing[:5]}")
        labels = np.asarray([int(mapping[t]) for t in corpus.tokens], dtype=np.int32)
        if n_labels is None:
            n_labels = int(labels.max()) + 1 if labels.size else 1
        return cls(labels, n_labels)

    def to_dict(self, corpus: PathCorpus) -> dict:
        return {t: int(g) for t, g in zip(corpus.tokens, self.labels)}

    @property
    def n_nodes(self) -> int:
        return int(self.labels.size)

    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_labels)

    def effective_labels(self) -> np.ndarray:
        return np.flatnonzero(self.group_sizes() > 0).astype(np.int32)

    @property
    def n_effective(self) -> int:
        return int(self.effective_labels().size)

    def canonical_form(self) -> np.ndarray:
        """Relabel groups in order of first appearance (restricted growth form)."""
        out = np.empty_like(self.labels)
        seen = {}
        for i, g in enumerate(self.labels):
            g = int(g)
            if g not in seen:
                seen[g] = len(seen)
            out[i] = seen[g]
        return out

    def same_blocks(self, other: "Partition") -> bool:
        """True when both partitions induce identical blocks (up to relabeling)."""
        if self.labels.size != other.labels.size:
            return False
        return bool(np.array_equal(self.canonical_form(), other.canonical_form()))

    def with_label(self, node: int, label: int) -> "Partition":
        labels = self.labels.copy()
        labels[node] = label
        return Partition(labels, self.n_labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n_labels == other.n_labels and np.array_equal(self.labels, other.labels)

    def __repr__(self) -> str:
        return f"Partition(n_nodes={self.n_nodes}, n_labels={self.n_labels}, effective={self.n_effective})"
