"""Line-oriented file formats: paths, labels, contacts, graphs, reports.

Paths: one path per line, whitespace-separated node tokens, `#` comments.
Contacts: CSV rows t,i,j (integer seconds, two node tokens).
Labels: CSV rows node,label. Graph: CSV rows src,dst. Reports: JSON.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Iterable

import numpy as np

from .corpus import GraphConstraint, Partition, PathCorpus
from .errors import MalformedInputError, UnknownNodeError


def _data_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def read_paths(path) -> list:
    """Token paths from a paths file."""
    return [line.split() for _, line in _data_lines(path)]


def write_paths(path, token_paths: Iterable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in token_paths:
            fh.write(" ".join(map(str, p)) + "\n")


def read_labels(path) -> dict:
    """node -> label token; label tokens are factorized later."""
    out = {}
    first = True
    for lineno, line in _data_lines(path):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MalformedInputError(f"{path}:{lineno}: expected 'node,label'")
        if first and parts == ["node", "label"]:
            first = False
            continue
        first = False
        if parts[0] in out:
            raise MalformedInputError(f"{path}:{lineno}: duplicate node {parts[0]!r}")
        out[parts[0]] = parts[1]
    return out


def write_labels(path, corpus: PathCorpus, partition: Partition) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "label"])
        for token, label in zip(corpus.tokens, partition.labels):
            writer.writerow([token, int(label)])


def labels_to_partition(mapping: dict, corpus: PathCorpus) -> Partition:
    """Factorize arbitrary label tokens into a Partition over the corpus."""
    unknown = sorted(set(mapping) - set(corpus.tokens))
    if unknown:
        raise UnknownNodeError(f"labels mention nodes not in the corpus: {unknown[:5]}")
    values = sorted(set(mapping.values()))
    level = {v: i for i, v in enumerate(values)}
    remapped = {node: level[v] for node, v in mapping.items()}
    return Partition.from_dict(remapped, corpus, n_labels=len(values))


@dataclass(frozen=True)
class ContactEvent:
    """One undirected time-stamped proximity event."""

    t: int
    i: str
    j: str


def read_contacts(path) -> list:
    events = []
    first = True
    for lineno, line in _data_lines(path):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise MalformedInputError(f"{path}:{lineno}: expected 't,i,j'")
        if first and parts[0] in ("t", "time", "timestamp"):
            first = False
            continue
        first = False
        try:
            t = int(parts[0])
        except ValueError:
            raise MalformedInputError(f"{path}:{lineno}: timestamp {parts[0]!r} is not an integer")
        if not parts[1] or not parts[2] or parts[1] == parts[2]:
            raise MalformedInputError(f"{path}:{lineno}: bad endpoints {parts[1]!r},{parts[2]!r}")
        events.append(ContactEvent(t, parts[1], parts[2]))
    return events


def write_contacts(path, events: Iterable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "i", "j"])
        for ev in events:
            writer.writerow([ev.t, ev.i, ev.j])


def extract_paths_from_contacts(events, resolution: int) -> PathCorpus:
    """One path per ego node: its partners ordered by time.

    Consecutive events with the same partner whose timestamps differ by at
    most the recording resolution are one ongoing interaction and collapse to
    a single occurrence. Nodes whose sequence is empty contribute no path but
    stay in the universe.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    per_ego: dict = {}
    universe = set()
    for ev in sorted(events, key=lambda e: (e.t, e.i, e.j)):
        if ev.i == ev.j:
            raise MalformedInputError(f"self-contact of node {ev.i!r} at t={ev.t}")
        universe.add(ev.i)
        universe.add(ev.j)
        for ego, partner in ((ev.i, ev.j), (ev.j, ev.i)):
            seq = per_ego.setdefault(ego, [])
            if seq and seq[-1][1] == partner and ev.t - seq[-1][0] <= resolution:
                seq[-1] = (ev.t, partner)  # ongoing interaction, refresh the clock
            else:
                seq.append((ev.t, partner))
    token_paths = [
        [partner for _, partner in per_ego[ego]] for ego in sorted(per_ego) if per_ego[ego]
    ]
    return PathCorpus.from_token_paths(token_paths, universe=universe)


def read_graph(path) -> GraphConstraint:
    pairs = []
    first = True
    for lineno, line in _data_lines(path):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MalformedInputError(f"{path}:{lineno}: expected 'src,dst'")
        if first and parts == ["src", "dst"]:
            first = False
            continue
        first = False
        pairs.append((parts[0], parts[1]))
    return GraphConstraint.from_pairs(pairs)


def write_report(path, report: dict) -> None:
    FsPath(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def read_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
