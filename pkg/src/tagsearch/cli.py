"""Command line front end for the experiment harness."""

from __future__ import annotations

import argparse
import json
import sys

import os

from .completion import build_index
from .corpus import filter_corpus, ingest_triples, write_triples
from .evaluation import (
    ExperimentSpec,
    leave_one_out_precision,
    ndcg_trace,
    scalability_sweep,
)
from .graph import NetworkSpec, build_network, load_edges, write_edges
from .synth import generate_synthetic


def _add_common(p):
    p.add_argument("--triples", help="path to a TSV of user/item/tag rows")
    p.add_argument("--edges", help="path to a TSV of user/user/weight rows")
    p.add_argument("--network", default="social",
                   choices=["social", "itemtag", "tag"],
                   help="edge source: explicit contacts or a similarity graph")
    p.add_argument("--theta", type=float, default=0.0,
                   help="minimum edge weight kept in the network")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--budget-ms", type=float, default=None)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--sample", type=int, default=100)
    p.add_argument("--min-item-taggers", type=int, default=1)
    p.add_argument("--min-user-items", type=int, default=1)
    p.add_argument("--synthetic", action="store_true",
                   help="generate a synthetic dataset instead of loading files")
    p.add_argument("--users", type=int, default=200)
    p.add_argument("--items", type=int, default=800)
    p.add_argument("--tags", type=int, default=120)
    p.add_argument("--n-triples", type=int, default=4000)
    p.add_argument("--out", help="write JSON lines here instead of stdout")


def _load(args):
    if args.synthetic or not args.triples:
        corpus, graph = generate_synthetic(
            seed=args.seed, n_users=args.users, n_items=args.items,
            n_tags=args.tags, n_triples=args.n_triples)
    else:
        corpus = ingest_triples(args.triples)
        graph = None
    spec = NetworkSpec(kind=args.network, theta=args.theta)
    if spec.kind == "social":
        if graph is None:
            if not args.edges:
                raise SystemExit("--edges is required with --network social")
            graph = load_edges(args.edges, corpus)
        graph = build_network(corpus, spec, graph)
    else:
        graph = build_network(corpus, spec)
    return corpus, graph


def _emit(rows, args):
    text = "\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec(args, **overrides):
    base = dict(
        alpha=args.alpha, k=args.k, sample=args.sample, seed=args.seed,
        budget_ms=args.budget_ms, min_item_taggers=args.min_item_taggers,
        min_user_items=args.min_user_items,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def cmd_precision(args):
    corpus, graph = _load(args)
    spec = _spec(args, two_word=args.two_word)
    report = leave_one_out_precision(corpus, graph, spec)
    _emit([{
        "experiment": "precision",
        "alpha": spec.alpha,
        "k": spec.k,
        "theta": args.theta,
        "trials": report.trials,
        "p_at_k": {str(l): v for l, v in report.p_at_k.items()},
    }], args)


def cmd_ndcg(args):
    corpus, graph = _load(args)
    spec = _spec(args)
    index = build_index(corpus)
    trace = ndcg_trace(corpus, index, graph, spec)
    _emit([{
        "experiment": "ndcg",
        "alpha": spec.alpha,
        "trials": trace.trials,
        "by_visited": [[cap, round(v, 6)] for cap, v in trace.by_visited],
        "by_time_ms": [[b, round(v, 6)] for b, v in trace.by_time],
        "final": trace.final,
    }], args)


def cmd_scale(args):
    corpus, graph = _load(args)
    spec = _spec(args)
    rows = scalability_sweep(corpus, graph, spec)
    _emit([dict(experiment="scale", alpha=spec.alpha, **r) for r in rows], args)


def cmd_synth(args):
    corpus, graph = _load(args)
    corpus = filter_corpus(corpus, min_users_per_item=args.min_item_taggers,
                           min_items_per_user=args.min_user_items)
    sys.stdout.write(
        f"users={len(corpus.users)} items={len(corpus.items)} "
        f"tags={len(corpus.tags)} triples={len(corpus._triples)} "
        f"edges={graph.n_edges()}\n")


def cmd_serve_prep(args):
    """Materialize a dataset plus a ready-to-run server config."""
    corpus, graph = _load(args)
    os.makedirs(args.out_dir, exist_ok=True)
    triples_path = os.path.join(args.out_dir, "triples.tsv")
    edges_path = os.path.join(args.out_dir, "edges.tsv")
    config_path = os.path.join(args.out_dir, "service.conf")
    write_triples(triples_path, corpus.iter_triples())
    write_edges(edges_path, graph, corpus)
    budget = "none" if args.budget_ms is None else f"{args.budget_ms:g}"
    # theta and derived networks are already applied to the edge file
    lines = [
        f"triples={triples_path}",
        f"edges={edges_path}",
        "network=social",
        "theta=0.0",
        f"k={args.k}",
        f"alpha={args.alpha:g}",
        f"budget_ms={budget}",
    ]
    with open(config_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    sys.stdout.write(
        f"wrote {triples_path} ({len(corpus._triples)} triples), "
        f"{edges_path} ({graph.n_edges()} edges), {config_path}\n")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tagsearch",
        description="experiments for the network-aware tag search engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("precision", help="leave-one-out P@k per prefix length")
    _add_common(p)
    p.add_argument("--two-word", action="store_true",
                   help="condition on a first full keyword before typing")
    p.set_defaults(func=cmd_precision)

    p = sub.add_parser("ndcg", help="anytime NDCG@20 vs visited users")
    _add_common(p)
    p.set_defaults(func=cmd_ndcg)

    p = sub.add_parser("scale", help="exact-answer latency vs corpus size")
    _add_common(p)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("synth", help="print synthetic dataset statistics")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve-prep",
                       help="write dataset files and a server config")
    _add_common(p)
    p.add_argument("--out-dir", required=True,
                   help="directory for triples.tsv, edges.tsv, service.conf")
    p.set_defaults(func=cmd_serve_prep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
