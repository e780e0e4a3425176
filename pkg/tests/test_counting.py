"""Counting: one-pass build, projection and node->group aggregation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathgroups import (
    GraphConstraint,
    Partition,
    PathCorpus,
    aggregate_counts,
    build_counts,
    project_to_order,
)
from pathgroups.errors import ConstraintViolationError, UnassignedNodeError

from conftest import layered_as_dicts, random_corpus, random_partition, recount_dicts


def corpus_of(*token_paths):
    return PathCorpus.from_token_paths(list(token_paths))


def test_single_path_counts():
    counts = build_counts(corpus_of(["a", "b", "a"]), 1)
    assert counts.exact[0].as_dict() == {(): {0: 1}}
    assert counts.tail.as_dict() == {(0,): {1: 1}, (1,): {0: 1}}
    assert counts.occurrence.tolist() == [2, 1]
    assert counts.n_paths == 1


def test_single_node_path():
    counts = build_counts(corpus_of(["a"]), 2)
    assert counts.exact[0].as_dict() == {(): {0: 1}}
    assert counts.exact[1].n_entries == 0
    assert counts.tail.n_entries == 0
    assert counts.occurrence.tolist() == [1]


def test_order_zero_tail_equals_occurrence():
    counts = build_counts(corpus_of(["a", "b", "a"], ["b"]), 0)
    assert counts.exact == ()
    assert counts.tail.as_dict() == {(): {0: 2, 1: 2}}


def test_layer_zero_sums_to_path_count(rng):
    corpus = random_corpus(rng, max_paths=6)
    counts = build_counts(corpus, 2)
    assert counts.exact[0].total == corpus.n_paths


def test_occurrence_totals():
    paths = [["a", "b", "c"] for _ in range(10)]
    counts = build_counts(corpus_of(*paths), 2)
    assert int(counts.occurrence.sum()) == 30


def test_constraint_violation_identifies_transition():
    constraint = GraphConstraint.from_pairs([("a", "b")])
    corpus = PathCorpus.from_token_paths([["a", "b"], ["b", "a"]], constraint=constraint)
    with pytest.raises(ConstraintViolationError, match="'b' -> 'a'"):
        build_counts(corpus, 1)


def test_constraint_allows_valid_paths():
    constraint = GraphConstraint.from_pairs([("a", "b"), ("b", "a")])
    corpus = PathCorpus.from_token_paths([["a", "b", "a"]], constraint=constraint)
    counts = build_counts(corpus, 1)
    assert counts.tail.total == 2


def test_start_nodes_not_constrained():
    # only transitions are validated; any node may start a path
    constraint = GraphConstraint.from_pairs([("a", "b")])
    corpus = PathCorpus.from_token_paths([["b"]], constraint=constraint)
    assert build_counts(corpus, 1).exact[0].total == 1


def test_build_matches_dict_recount(rng):
    for _ in range(50):
        corpus = random_corpus(rng)
        k_max = int(rng.integers(0, 4))
        counts = build_counts(corpus, k_max)
        exact, tail, occ = recount_dicts(corpus.paths, k_max)
        got_exact, got_tail, got_occ = layered_as_dicts(counts)
        assert got_exact == exact
        assert got_tail == tail
        assert got_occ == occ


def test_project_identity(rng):
    corpus = random_corpus(rng)
    counts = build_counts(corpus, 2)
    assert project_to_order(counts, 2) is counts


def test_project_to_zero_matches_occurrence(rng):
    corpus = random_corpus(rng)
    counts = build_counts(corpus, 3)
    projected = project_to_order(counts, 0)
    table = projected.tail.as_dict().get((), {})
    expect = {i: int(c) for i, c in enumerate(counts.occurrence) if c}
    assert table == expect


def test_project_worked_example():
    counts = build_counts(corpus_of(["a", "b", "c"]), 2)
    projected = project_to_order(counts, 1)
    assert projected.tail.as_dict() == {(0,): {1: 1}, (1,): {2: 1}}


def test_project_out_of_range(rng):
    counts = build_counts(random_corpus(rng), 1)
    with pytest.raises(ValueError):
        project_to_order(counts, 2)


@settings(max_examples=60, deadline=None)
@given(
    data=st.lists(
        st.lists(st.integers(0, 4), min_size=1, max_size=6), min_size=1, max_size=5
    ),
    k_max=st.integers(0, 3),
    k=st.integers(0, 3),
)
def test_projection_equals_rebuild(data, k_max, k):
    k = min(k, k_max)
    corpus = PathCorpus.from_token_paths(
        [[f"n{i}" for i in p] for p in data], universe=[f"n{i}" for i in range(5)]
    )
    full = build_counts(corpus, k_max)
    direct = build_counts(corpus, k)
    assert project_to_order(full, k).equals(direct)


@settings(max_examples=60, deadline=None)
@given(
    data=st.lists(
        st.lists(st.integers(0, 4), min_size=1, max_size=6), min_size=1, max_size=5
    ),
    labels=st.lists(st.integers(0, 2), min_size=5, max_size=5),
    k_max=st.integers(0, 3),
)
def test_aggregation_equals_relabeled_rebuild(data, labels, k_max):
    corpus = PathCorpus.from_token_paths(
        [[f"n{i}" for i in p] for p in data], universe=[f"n{i}" for i in range(5)]
    )
    partition = Partition(np.asarray(labels, dtype=np.int32), 3)
    grouped = aggregate_counts(build_counts(corpus, k_max), partition)
    relabeled = PathCorpus.from_token_paths(
        [[f"g{partition.labels[i]}" for i in p] for p in data],
        universe=[f"g{j}" for j in range(3)],
    )
    assert grouped.equals(build_counts(relabeled, k_max))


def test_aggregate_identity_partition(rng):
    corpus = random_corpus(rng)
    counts = build_counts(corpus, 2)
    ident = Partition(np.arange(corpus.n_nodes, dtype=np.int32), corpus.n_nodes)
    assert aggregate_counts(counts, ident).equals(counts)


def test_aggregate_total_collapse(rng):
    corpus = random_corpus(rng)
    counts = build_counts(corpus, 2)
    one = Partition(np.zeros(corpus.n_nodes, dtype=np.int32), 1)
    grouped = aggregate_counts(counts, one)
    for (_, _, layer), (_, _, orig) in zip(grouped.layers(), counts.layers()):
        assert layer.total == orig.total
        if layer.n_entries:
            assert layer.n_entries == 1
            assert set(layer.succs.tolist()) == {0}


def test_aggregate_worked_example():
    corpus = corpus_of(["a", "b"], ["c", "d"])
    counts = build_counts(corpus, 1)
    partition = Partition(np.array([0, 1, 0, 1], dtype=np.int32), 2)  # {a,c} {b,d}
    grouped = aggregate_counts(counts, partition)
    assert grouped.tail.as_dict() == {(0,): {1: 2}}


def test_aggregate_size_mismatch(rng):
    counts = build_counts(random_corpus(rng, max_nodes=4), 1)
    bad = Partition(np.zeros(counts.n_symbols + 1, dtype=np.int32), 1)
    with pytest.raises(UnassignedNodeError):
        aggregate_counts(counts, bad)


def test_tail_mass_conservation(rng):
    for _ in range(20):
        corpus = random_corpus(rng)
        k = int(rng.integers(0, 4))
        counts = build_counts(corpus, k)
        expect = sum(max(0, p.size - k) for p in corpus.paths)
        assert counts.tail.total == expect


def test_counts_are_immutable(rng):
    counts = build_counts(random_corpus(rng), 1)
    with pytest.raises(ValueError):
        counts.occurrence[0] = 99
    with pytest.raises(ValueError):
        counts.tail.counts[:] = 0
