"""Command-line interface.

Subcommands: ingest, synth, detect, scan-order, ami, replicate. Exit codes:
0 success, 2 malformed input or inconsistent node universes, 3 constraint
violation, 4 infeasible exhaustive search, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path as FsPath

import numpy as np

from . import fileio, protocols
from .corpus import PathCorpus
from .counting import build_counts
from .errors import (
    ConstraintViolationError,
    InfeasibleSearchError,
    MalformedInputError,
    PathgroupsError,
    UnassignedNodeError,
    UnknownNodeError,
)
from .evaluate import AMI_NORMALIZER, ami, order_scan_fixed_labels
from .kernels import backend_name
from .search import MhConfig, exhaustive_search, mh_search

EXIT_INPUT = 2
EXIT_CONSTRAINT = 3
EXIT_INFEASIBLE = 4


def _load_corpus(args) -> PathCorpus:
    constraint = fileio.read_graph(args.graph) if getattr(args, "graph", None) else None
    token_paths = fileio.read_paths(args.corpus)
    return PathCorpus.from_token_paths(token_paths, constraint=constraint)


def cmd_ingest(args) -> int:
    if (args.paths is None) == (args.contacts is None):
        raise MalformedInputError("ingest needs exactly one of --paths / --contacts")
    if args.paths:
        corpus = PathCorpus.from_token_paths(fileio.read_paths(args.paths))
    else:
        events = fileio.read_contacts(args.contacts)
        corpus = fileio.extract_paths_from_contacts(events, args.resolution)
    fileio.write_paths(args.out, corpus.token_paths())
    print(f"ingested {corpus.n_paths} paths over {corpus.n_nodes} nodes -> {args.out}")
    return 0


def cmd_synth(args) -> int:
    from .synthetic import (
        assemble_truth,
        make_community_dynamics,
        make_random_mon,
        make_role_dynamics,
        sample_paths,
    )

    gen = protocols.substream(args.seed, 0)
    if args.model == "communities":
        layers = make_community_dynamics(args.groups, args.p_in)
    elif args.model == "roles":
        layers = make_role_dynamics(args.groups, args.p_stay)
    elif args.model == "random-mon":
        layers = make_random_mon(args.groups, args.order, gen)
    else:
        raise MalformedInputError(f"unknown model {args.model!r}")
    truth = assemble_truth(layers, [args.nodes_per_group] * args.groups, args.emission, gen)
    corpus = sample_paths(truth, args.paths, args.length, protocols.substream(args.seed, 1))
    fileio.write_paths(args.out_corpus, corpus.token_paths())
    if args.out_labels:
        fileio.write_labels(args.out_labels, corpus, truth.partition)
    print(f"sampled {corpus.n_paths} paths of length {args.length} -> {args.out_corpus}")
    return 0


def cmd_detect(args) -> int:
    started = time.perf_counter()
    if args.scoring == "fixed" and args.fixed_order is None:
        raise MalformedInputError("--scoring fixed requires --fixed-order")
    corpus = _load_corpus(args)
    counts = build_counts(corpus, args.k_max)
    pairs = corpus.constraint_pairs()
    fixed_order = args.fixed_order if args.scoring == "fixed" else None
    reference = None
    if args.reference_labels:
        reference = fileio.labels_to_partition(
            fileio.read_labels(args.reference_labels), corpus
        )

    runs = []
    if args.search == "exhaustive":
        best = exhaustive_search(
            counts,
            args.max_groups,
            args.k_max,
            constraint_pairs=pairs,
            bf_threshold=args.bf_threshold,
            fixed_order=fixed_order,
        )
        runs.append({"run": 0, "log_marginal": best.log_marginal, "order": best.order})
    else:
        seeds = [
            int(s.generate_state(1)[0])
            for s in np.random.SeedSequence(args.seed).spawn(args.runs)
        ]
        best = None
        for r, seed in enumerate(seeds):
            config = MhConfig(
                n_labels=args.max_groups,
                iterations=args.iterations,
                seed=seed,
                k_max=args.k_max,
                scoring=args.scoring,
                fixed_order=fixed_order,
                bf_threshold=args.bf_threshold,
            )
            scored, _ = mh_search(counts, config, constraint_pairs=pairs)
            runs.append(
                {"run": r, "seed": seed, "log_marginal": scored.log_marginal, "order": scored.order}
            )
            if best is None or scored.log_marginal > best.log_marginal:
                best = scored

    report = {
        "config": {
            "command": "detect",
            "corpus": str(args.corpus),
            "graph": str(args.graph) if args.graph else None,
            "search": args.search,
            "k_max": args.k_max,
            "max_groups": args.max_groups,
            "iterations": args.iterations,
            "runs": args.runs,
            "seed": args.seed,
            "scoring": args.scoring,
            "fixed_order": fixed_order,
            "bf_threshold": args.bf_threshold,
            "kernel_backend": backend_name(),
            "ami_normalizer": AMI_NORMALIZER,
        },
        "best": {
            "labels": best.partition.to_dict(corpus),
            "n_effective_groups": best.partition.n_effective,
            "selected_order": best.order,
            "log_marginal": best.log_marginal,
            "per_order_log_marginal": best.per_order,
        },
        "per_run": runs,
        "wall_clock_seconds": time.perf_counter() - started,
    }
    if reference is not None:
        report["best"]["ami_vs_reference"] = ami(best.partition, reference)
    if args.out:
        fileio.write_report(args.out, report)
    print(
        f"best: {best.partition.n_effective} groups, order {best.order}, "
        f"log marginal {best.log_marginal:.4f}"
        + (f", AMI {report['best']['ami_vs_reference']:.4f}" if reference is not None else "")
    )
    return 0


def cmd_scan_order(args) -> int:
    corpus = _load_corpus(args)
    counts = build_counts(corpus, args.k_max)
    labels = fileio.labels_to_partition(fileio.read_labels(args.labels), corpus)
    series = order_scan_fixed_labels(
        counts, labels, args.k_max, constraint_pairs=corpus.constraint_pairs()
    )
    rows = [(k, float(v)) for k, v in enumerate(series)]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["order", "log_marginal"])
            writer.writerows(rows)
    for k, v in rows:
        print(f"order {k}: {v:.6f}")
    return 0


def cmd_ami(args) -> int:
    a = fileio.read_labels(args.labels_a)
    b = fileio.read_labels(args.labels_b)
    if set(a) != set(b):
        raise UnknownNodeError("label files cover different node sets")
    tokens = sorted(a)
    u = _factorize([a[t] for t in tokens])
    v = _factorize([b[t] for t in tokens])
    print(f"{ami(u, v):.6f}")
    return 0


def _factorize(values) -> np.ndarray:
    levels = {val: i for i, val in enumerate(sorted(set(values)))}
    return np.asarray([levels[v] for v in values], dtype=np.int32)


def cmd_replicate(args) -> int:
    out_dir = FsPath(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = args.experiment

    if name in ("communities", "roles"):
        results = protocols.run_planted_block_replicates(
            name, args.replicates, args.seed
        )
        true_order = 1
    elif name in ("synth-1", "synth-2", "synth-3"):
        true_order = int(name.split("-")[1])
        results = protocols.run_random_mon_replicates(
            true_order, args.replicates, args.seed, n_paths=args.paths
        )
    elif name == "fixed-order":
        scores = protocols.run_fixed_order_comparison(args.seed, runs=args.runs)
        path = out_dir / "fixed_order.csv"
        with open(path, "w", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["order", "best_log_marginal"])
            for k in sorted(scores):
                writer.writerow([k, scores[k]])
        print(f"fixed-order comparison -> {path}")
        for k in sorted(scores):
            print(f"order {k}: best log marginal {scores[k]:.4f}")
        return 0
    elif name == "from-labels":
        run = protocols.run_from_labels(args.seed, iterations=args.iterations)
        trace = run["trace"]
        path = out_dir / "from_labels_trace.csv"
        with open(path, "w", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "accepted", "log_marginal", "best_log_marginal", "ami_vs_start"])
            for i in range(trace.accepted.size):
                writer.writerow(
                    [
                        i,
                        int(trace.accepted[i]),
                        trace.current_log_marginal[i],
                        trace.best_log_marginal[i],
                        trace.ami_vs_reference[i],
                    ]
                )
        print(
            f"from-labels trace -> {path} (final AMI vs start "
            f"{trace.ami_vs_reference[-1]:.4f})"
        )
        return 0
    else:
        raise MalformedInputError(f"unknown experiment {name!r}")

    path = out_dir / f"{name.replace('-', '_')}.csv"
    with open(path, "w", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["replicate", "ami", "selected_order", "log_marginal", "n_paths", "escalated"]
        )
        for r in results:
            writer.writerow(
                [r.replicate, r.ami, r.selected_order, r.log_marginal, r.n_paths, int(r.escalated)]
            )
    amis = np.array([r.ami for r in results])
    orders = [r.selected_order for r in results]
    recovered = sum(r.recovered(true_order) for r in results)
    print(
        f"{name}: mean AMI {amis.mean():.4f}, orders {orders}, "
        f"recovered {recovered}/{len(results)} -> {path}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathgroups",
        description="Detect node groups with shared multi-order dynamics in pathway data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize paths or extract them from a contact log")
    p.add_argument("--paths", help="paths file to normalize")
    p.add_argument("--contacts", help="contact CSV (t,i,j) to extract ego paths from")
    p.add_argument("--resolution", type=int, default=20, help="recording resolution in seconds")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="sample a synthetic corpus from a planted model")
    p.add_argument("--model", required=True, choices=["communities", "roles", "random-mon"])
    p.add_argument("--groups", type=int, default=3)
    p.add_argument("--nodes-per-group", type=int, default=3)
    p.add_argument("--order", type=int, default=1, help="order of the random-mon model")
    p.add_argument("--p-in", type=float, default=0.70)
    p.add_argument("--p-stay", type=float, default=0.10)
    p.add_argument("--paths", type=int, default=500)
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--emission", choices=["dirichlet", "uniform"], default="dirichlet")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-corpus", required=True)
    p.add_argument("--out-labels")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("detect", help="search for the best partition of a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--graph", help="graph constraint CSV (src,dst)")
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--max-groups", type=int, required=True)
    p.add_argument("--search", choices=["exhaustive", "mh"], default="mh")
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scoring", choices=["ladder", "fixed"], default="ladder")
    p.add_argument("--fixed-order", type=int, help="order used when --scoring fixed")
    p.add_argument("--bf-threshold", type=float, default=150.0)
    p.add_argument("--reference-labels", help="labels CSV for AMI reporting")
    p.add_argument("--out", help="write the run report JSON here")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("scan-order", help="log marginal of fixed labels at each order")
    p.add_argument("--corpus", required=True)
    p.add_argument("--graph")
    p.add_argument("--labels", required=True)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--out", help="write the table as CSV here")
    p.set_defaults(func=cmd_scan_order)

    p = sub.add_parser("ami", help="adjusted mutual information of two label files")
    p.add_argument("labels_a")
    p.add_argument("labels_b")
    p.set_defaults(func=cmd_ami)

    p = sub.add_parser("replicate", help="run a named synthetic experiment")
    p.add_argument(
        "--experiment",
        required=True,
        choices=["communities", "roles", "synth-1", "synth-2", "synth-3", "fixed-order", "from-labels"],
    )
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--paths", type=int, default=10**4, help="paths per synth replicate")
    p.add_argument("--runs", type=int, default=5, help="MH runs for fixed-order")
    p.add_argument("--iterations", type=int, default=1000, help="MH iterations for from-labels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="replicates")
    p.set_defaults(func=cmd_replicate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MalformedInputError, UnknownNodeError, UnassignedNodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConstraintViolationError as exc:
        print(f"constraint violation: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except InfeasibleSearchError as exc:
        print(f"infeasible search: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PathgroupsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
