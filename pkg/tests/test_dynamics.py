"""Group dynamics: successor sets, layered evidence, order selection."""

import math

import numpy as np
import pytest

from pathgroups import (
    Partition,
    PathCorpus,
    SuccessorSet,
    aggregate_counts,
    build_counts,
    mon_log_marginal,
    mon_posterior,
    select_order,
)
from pathgroups.errors import ConstraintViolationError

from conftest import mon_oracle, random_corpus, random_partition, relabeled_paths


def group_counts_for(token_paths, labels, n_labels, k_max):
    corpus = PathCorpus.from_token_paths(token_paths)
    part = Partition(np.asarray(labels, dtype=np.int32), n_labels)
    return aggregate_counts(build_counts(corpus, k_max), part), part


def test_single_group_evidence_is_zero():
    counts, part = group_counts_for([["a", "b", "a", "c"], ["b", "c"]], [0, 0, 0], 1, 2)
    succ = SuccessorSet.from_partition(part)
    for k in range(3):
        assert mon_log_marginal(counts, k, succ) == 0.0


def test_two_group_worked_example():
    # group paths {(g,h), (g,g)} at order 1: starts 1/3, transitions 1/6
    counts, part = group_counts_for([["g", "h"], ["g", "g"]], [0, 1], 2, 1)
    succ = SuccessorSet.from_partition(part)
    assert mon_log_marginal(counts, 1, succ) == pytest.approx(math.log(1 / 18), abs=1e-12)


def test_empty_corpus_evidence_zero():
    corpus = PathCorpus.from_token_paths([], universe=["a", "b"])
    part = Partition(np.array([0, 1], dtype=np.int32), 2)
    counts = aggregate_counts(build_counts(corpus, 2), part)
    succ = SuccessorSet.from_partition(part)
    for k in range(3):
        assert mon_log_marginal(counts, k, succ) == 0.0


def test_matches_polya_oracle(rng):
    for _ in range(200):
        corpus = random_corpus(rng)
        part = random_partition(rng, corpus.n_nodes)
        k = int(rng.integers(0, 3))
        counts = aggregate_counts(build_counts(corpus, k), part)
        succ = SuccessorSet.from_partition(part)
        got = mon_log_marginal(counts, k, succ)
        expect = mon_oracle(relabeled_paths(corpus, part), k, succ.members)
        assert got == pytest.approx(expect, abs=1e-9)


def test_matches_polya_oracle_constrained(rng):
    for _ in range(100):
        corpus = random_corpus(rng)
        # constraint = observed transitions plus random extra edges
        observed = {
            (int(a), int(b)) for p in corpus.paths for a, b in zip(p[:-1], p[1:])
        }
        extra = {
            (int(rng.integers(corpus.n_nodes)), int(rng.integers(corpus.n_nodes)))
            for _ in range(3)
        }
        pairs = np.array(sorted(observed | extra), dtype=np.int32).reshape(-1, 2)
        part = random_partition(rng, corpus.n_nodes)
        k = int(rng.integers(0, 3))
        counts = aggregate_counts(build_counts(corpus, k), part)
        succ = SuccessorSet.from_partition(part, pairs)
        got = mon_log_marginal(counts, k, succ)
        expect = mon_oracle(relabeled_paths(corpus, part), k, succ.members)
        assert got == pytest.approx(expect, abs=1e-9)


def test_unconstrained_successors_are_effective_groups():
    part = Partition(np.array([0, 0, 2], dtype=np.int32), 4)  # label 1, 3 empty
    succ = SuccessorSet.from_partition(part)
    assert succ.members(()).tolist() == [0, 2]
    assert succ.members((2,)).tolist() == [0, 2]
    assert succ.size((0,)) == 2


def test_constrained_successors_depend_on_last_element():
    part = Partition(np.array([0, 1, 2], dtype=np.int32), 3)
    pairs = np.array([[0, 1], [1, 2], [2, 0], [2, 1]], dtype=np.int32)
    succ = SuccessorSet.from_partition(part, pairs)
    assert succ.members((0,)).tolist() == [1]
    assert succ.members((1,)).tolist() == [2]
    assert succ.members((2,)).tolist() == [0, 1]
    assert succ.members((1, 2)).tolist() == [0, 1]  # only the last element matters
    assert succ.members(()).tolist() == [0, 1, 2]  # starts are unconstrained


def test_richer_successor_sets_never_raise_evidence(rng):
    for _ in range(50):
        corpus = random_corpus(rng)
        part = random_partition(rng, corpus.n_nodes)
        counts = aggregate_counts(build_counts(corpus, 1), part)
        observed = {
            (int(a), int(b)) for p in corpus.paths for a, b in zip(p[:-1], p[1:])
        }
        if not observed:
            continue
        pairs = np.array(sorted(observed), dtype=np.int32).reshape(-1, 2)
        tight = SuccessorSet.from_partition(part, pairs)
        loose = SuccessorSet.from_partition(part)  # fully connected
        assert mon_log_marginal(counts, 1, tight) >= mon_log_marginal(counts, 1, loose) - 1e-12


def test_constraint_violation_named():
    counts, part = group_counts_for([["a", "b"]], [0, 1], 2, 1)
    pairs = np.array([[1, 0]], dtype=np.int32)  # only b->a permitted
    succ = SuccessorSet.from_partition(part, pairs)
    with pytest.raises(ConstraintViolationError, match=r"history \(0,\)"):
        mon_log_marginal(counts, 1, succ)


def test_orders_agree_on_start_only_corpora(rng):
    corpus = PathCorpus.from_token_paths([["a"], ["b"], ["a"]])
    part = Partition(np.array([0, 1], dtype=np.int32), 2)
    counts = aggregate_counts(build_counts(corpus, 3), part)
    succ = SuccessorSet.from_partition(part)
    values = {mon_log_marginal(counts, k, succ) for k in range(1, 4)}
    assert len(values) == 1


def test_select_order_empty_corpus():
    corpus = PathCorpus.from_token_paths([], universe=["a", "b"])
    part = Partition(np.array([0, 1], dtype=np.int32), 2)
    counts = aggregate_counts(build_counts(corpus, 2), part)
    result = select_order(counts, 2, SuccessorSet.from_partition(part))
    assert result.selected_order == 0
    assert np.all(result.log_marginals == 0.0)
    assert np.all(result.log_bayes_factors == 0.0)


def test_select_order_is_deterministic(rng):
    corpus = random_corpus(rng, max_paths=4)
    part = random_partition(rng, corpus.n_nodes)
    counts = aggregate_counts(build_counts(corpus, 2), part)
    succ = SuccessorSet.from_partition(part)
    a = select_order(counts, 2, succ)
    b = select_order(counts, 2, succ)
    assert a.selected_order == b.selected_order
    assert np.array_equal(a.log_marginals, b.log_marginals)


def test_select_order_ladder_stops_at_first_rejection():
    from pathgroups.dynamics import ladder_select

    lm = np.array([0.0, 10.0, 12.0, 40.0])  # step 2 fails the threshold
    result = ladder_select(lm, 150.0)
    assert result.selected_order == 1
    assert result.accepted.tolist() == [True, False, True]


def test_posterior_update_and_prior():
    counts, part = group_counts_for([["a", "b"], ["a", "a"]], [0, 1], 2, 1)
    succ = SuccessorSet.from_partition(part)
    post = mon_posterior(counts, 1, succ)
    members, alphas = post.concentration((0,))
    assert members.tolist() == [0, 1]
    assert alphas.tolist() == [2.0, 2.0]  # one a->a, one a->b
    members, alphas = post.concentration((1,))  # never observed
    assert alphas.tolist() == [1.0, 1.0]


def test_posterior_single_permitted_successor():
    counts, part = group_counts_for([["a", "b"], ["a", "b"]], [0, 1], 2, 1)
    pairs = np.array([[0, 1], [1, 1]], dtype=np.int32)
    succ = SuccessorSet.from_partition(part, pairs)
    post = mon_posterior(counts, 1, succ)
    members, probs = post.predictive((0,))
    assert members.tolist() == [1]
    assert probs.tolist() == [1.0]
