"""Ground-truth generators for synthetic pathway experiments.

A ground truth holds per-layer stochastic tensors over groups (orders 0..K),
a per-group emission distribution over member nodes, and the planted
partition. Path sampling walks the group layers first and emits member nodes
independently, which mirrors the generative reading of the joint model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Partition, PathCorpus
from .model import HogModel

PROB_ATOL = 1e-12


@dataclass(frozen=True)
class GroundTruth:
    """Planted partition, group dynamics tensors and emission distributions."""

    partition: Partition
    layers: tuple  # layer k: shape (n_groups,) * (k + 1)
    members: tuple  # per group: sorted node indices
    emissions: tuple  # per group: probabilities aligned with members
    order: int
    tokens: tuple

    def __post_init__(self):
        n = self.partition.n_labels
        if len(self.layers) != self.order + 1:
            raise ValueError("need one dynamics layer per order 0..K")
        for k, layer in enumerate(self.layers):
            if layer.shape != (n,) * (k + 1):
                raise ValueError(f"layer {k} has shape {layer.shape}")
            sums = layer.reshape(-1, n).sum(axis=1)
            if not np.allclose(sums, 1.0, atol=PROB_ATOL, rtol=0.0):
                raise ValueError(f"layer {k} rows do not sum to 1")
        for g, (mem, emis) in enumerate(zip(self.members, self.emissions)):
            if not np.isclose(emis.sum(), 1.0, atol=PROB_ATOL, rtol=0.0):
                raise ValueError(f"group {g} emission does not sum to 1")
            if mem.size != emis.size:
                raise ValueError(f"group {g} emission size mismatch")

    @property
    def n_groups(self) -> int:
        return self.partition.n_labels


def make_community_dynamics(n_groups: int, p_in: float) -> list:
    """Order-1 dynamics with within-group mass p_in, remainder split evenly;
    uniform start distribution."""
    if not 0.0 < p_in < 1.0:
        raise ValueError("p_in must be in (0, 1)")
    if n_groups < 2:
        raise ValueError("need at least 2 groups")
    start = np.full(n_groups, 1.0 / n_groups)
    mat = np.full((n_groups, n_groups), (1.0 - p_in) / (n_groups - 1))
    np.fill_diagonal(mat, p_in)
    return [start, mat]


def make_role_dynamics(n_groups: int, p_stay: float) -> list:
    """Order-1 dynamics with diagonal mass p_stay, off-diagonal split evenly."""
    return make_community_dynamics(n_groups, p_stay)


def make_random_mon(n_groups: int, order: int, rng: np.random.Generator) -> list:
    """Every layer's transition vector drawn uniformly from the simplex."""
    if order < 0:
        raise ValueError("order must be >= 0")
    layers = []
    for k in range(order + 1):
        shape = (n_groups,) * (k + 1)
        layers.append(rng.dirichlet(np.ones(n_groups), size=shape[:-1]).reshape(shape))
    return layers


def assemble_truth(
    layers,
    group_sizes,
    emission: str = "dirichlet",
    rng: np.random.Generator = None,
    token_prefix: str = "v",
) -> GroundTruth:
    """Attach a partition and per-group emissions to dynamics layers.

    emission="dirichlet" draws each group's emission from a flat Dirichlet;
    "uniform" uses exactly 1/|g|.
    """
    layers = [np.asarray(l, dtype=np.float64) for l in layers]
    n_groups = layers[0].shape[0]
    group_sizes = list(group_sizes)
    if len(group_sizes) != n_groups:
        raise ValueError("one size per group required")
    labels = np.repeat(np.arange(n_groups, dtype=np.int32), group_sizes)
    n_nodes = int(labels.size)
    members = []
    emissions = []
    start = 0
    for g, size in enumerate(group_sizes):
        mem = np.arange(start, start + size, dtype=np.int32)
        start += size
        if emission == "dirichlet":
            if rng is None:
                raise ValueError("dirichlet emissions need an rng")
            probs = rng.dirichlet(np.ones(size))
        elif emission == "uniform":
            probs = np.full(size, 1.0 / size)
        else:
            raise ValueError(f"unknown emission mode {emission!r}")
        members.append(mem)
        emissions.append(probs)
    width = len(str(max(n_nodes - 1, 0)))
    tokens = tuple(f"{token_prefix}{i:0{width}d}" for i in range(n_nodes))
    return GroundTruth(
        Partition(labels, n_groups),
        tuple(layers),
        tuple(members),
        tuple(emissions),
        len(layers) - 1,
        tokens,
    )


def sample_group_paths(
    truth: GroundTruth, n_paths: int, length: int, rng: np.random.Generator
) -> np.ndarray:
    """Group-level paths as an (n_paths, length + 1) matrix.

    Step i < K draws from layer i under the full prefix; later steps from the
    top layer under the trailing window. Vectorized over paths via rolling
    history keys.
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    n = truth.n_groups
    K = truth.order
    out = np.empty((n_paths, length + 1), dtype=np.int32)
    keys = np.zeros(n_paths, dtype=np.int64)
    mod = n**K if K > 0 else 1
    for i in range(length + 1):
        layer = truth.layers[min(i, K)].reshape(-1, n)
        cdf = np.cumsum(layer[keys], axis=1)
        u = rng.random(n_paths)
        g = (cdf < u[:, None]).sum(axis=1).astype(np.int32)
        np.clip(g, 0, n - 1, out=g)
        out[:, i] = g
        keys = (keys * n + g) % mod
    return out


def sample_paths(
    truth: GroundTruth, n_paths: int, length: int, rng: np.random.Generator
) -> PathCorpus:
    """Sample node paths: group walk first, then per-group node emission."""
    groups = sample_group_paths(truth, n_paths, length, rng)
    nodes = np.empty_like(groups)
    for g in range(truth.n_groups):
        mask = groups == g
        m = int(mask.sum())
        if m == 0:
            continue
        cdf = np.cumsum(truth.emissions[g])
        idx = np.searchsorted(cdf, rng.random(m), side="right")
        np.clip(idx, 0, truth.members[g].size - 1, out=idx)
        nodes[mask] = truth.members[g][idx]
    return PathCorpus(list(truth.tokens), list(nodes))


def truth_to_model(truth: GroundTruth) -> HogModel:
    """Wrap a ground truth as a joint model with explicit parameter tables."""
    return HogModel(
        truth.partition,
        truth.order,
        true_emission=tuple(zip(truth.members, truth.emissions)),
        true_dynamics=truth.layers,
    )
