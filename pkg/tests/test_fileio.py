"""File formats and contact-log path extraction."""

import numpy as np
import pytest

from pathgroups import PathCorpus, Partition
from pathgroups.errors import MalformedInputError, UnknownNodeError
from pathgroups.fileio import (
    ContactEvent,
    extract_paths_from_contacts,
    labels_to_partition,
    read_contacts,
    read_graph,
    read_labels,
    read_paths,
    read_report,
    write_labels,
    write_paths,
    write_report,
)


def test_paths_roundtrip(tmp_path):
    f = tmp_path / "corpus.paths"
    f.write_text("# demo corpus\na b a\nc  c\n\nb # trailing comment\n")
    paths = read_paths(f)
    assert paths == [["a", "b", "a"], ["c", "c"], ["b"]]
    corpus = PathCorpus.from_token_paths(paths)
    out = tmp_path / "rt.paths"
    write_paths(out, corpus.token_paths())
    again = PathCorpus.from_token_paths(read_paths(out))
    assert again.tokens == corpus.tokens
    assert all(np.array_equal(a, b) for a, b in zip(again.paths, corpus.paths))


def test_labels_roundtrip_and_factorization(tmp_path):
    f = tmp_path / "labels.csv"
    f.write_text("node,label\na,red\nb,blue\nc,red\n")
    mapping = read_labels(f)
    corpus = PathCorpus.from_token_paths([["a", "b", "c"]])
    part = labels_to_partition(mapping, corpus)
    assert part.labels.tolist() == [1, 0, 1]  # blue=0, red=1 (sorted levels)
    out = tmp_path / "out.csv"
    write_labels(out, corpus, part)
    assert read_labels(out) == {"a": "1", "b": "0", "c": "1"}


def test_labels_errors(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("a,1\na,2\n")
    with pytest.raises(MalformedInputError, match="duplicate"):
        read_labels(f)
    f2 = tmp_path / "bad2.csv"
    f2.write_text("just-one-column\n")
    with pytest.raises(MalformedInputError, match=":1:"):
        read_labels(f2)


def test_labels_unknown_node(tmp_path):
    corpus = PathCorpus.from_token_paths([["a", "b"]])
    with pytest.raises(UnknownNodeError):
        labels_to_partition({"a": 0, "b": 1, "z": 0}, corpus)


def test_partition_must_cover_corpus():
    corpus = PathCorpus.from_token_paths([["a", "b"]])
    from pathgroups.errors import UnassignedNodeError

    with pytest.raises(UnassignedNodeError, match="'b'"):
        Partition.from_dict({"a": 0}, corpus)


def test_contacts_parsing_errors(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("t,i,j\n0,a,b\nnope,a,b\n")
    with pytest.raises(MalformedInputError, match=":3:"):
        read_contacts(f)
    f.write_text("0,a,a\n")
    with pytest.raises(MalformedInputError):
        read_contacts(f)


def test_graph_reading(tmp_path):
    f = tmp_path / "g.csv"
    f.write_text("src,dst\na,b\nb,a\n")
    g = read_graph(f)
    assert ("a", "b") in g and ("b", "a") in g and ("a", "a") not in g


def test_report_roundtrip(tmp_path):
    f = tmp_path / "r.json"
    write_report(f, {"a": np.int64(3), "b": np.array([1.5, 2.5]), "c": "x"})
    assert read_report(f) == {"a": 3, "b": [1.5, 2.5], "c": "x"}


# -- contact extraction --------------------------------------------------------


def E(t, i, j):
    return ContactEvent(t, i, j)


def test_consecutive_stamps_collapse():
    corpus = extract_paths_from_contacts(
        [E(0, "a", "b"), E(20, "a", "b"), E(40, "a", "c")], resolution=20
    )
    # ego a: partner b at 0/20 is one interaction, then c
    assert ["b", "c"] in corpus.token_paths()


def test_single_event_both_directions():
    corpus = extract_paths_from_contacts([E(0, "a", "b")], resolution=20)
    assert sorted(corpus.token_paths()) == [["a"], ["b"]]


def test_non_consecutive_repeat_kept():
    corpus = extract_paths_from_contacts([E(0, "a", "b"), E(60, "a", "b")], resolution=20)
    assert ["b", "b"] in corpus.token_paths()
    assert ["a", "a"] in corpus.token_paths()


def test_extraction_sorts_unordered_input():
    corpus = extract_paths_from_contacts(
        [E(40, "a", "c"), E(0, "a", "b"), E(20, "a", "b")], resolution=20
    )
    assert ["b", "c"] in corpus.token_paths()


def test_extraction_run_longer_than_two():
    corpus = extract_paths_from_contacts(
        [E(0, "a", "b"), E(20, "a", "b"), E(40, "a", "b"), E(100, "a", "b")],
        resolution=20,
    )
    # one run of three stamps, then a separate interaction
    assert ["b", "b"] in corpus.token_paths()


def test_bundled_demo_contacts_parse():
    events = read_contacts("tests/data/demo_contacts.csv")
    assert len(events) > 1000
    corpus = extract_paths_from_contacts(events, resolution=20)
    assert corpus.n_nodes == 12
    assert corpus.n_paths == 12
