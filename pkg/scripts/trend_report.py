"""Precision and NDCG trend curves on a tag-affinity synthetic corpus.

Prints one JSON line per curve. Deterministic in --seed.
"""

import argparse
import json

from tagsearch.completion import build_index
from tagsearch.evaluation import ExperimentSpec, leave_one_out_precision, ndcg_trace
from tagsearch.graph import filter_edges
from tagsearch.synth import generate_synthetic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=40)
    ap.add_argument("--sample", type=int, default=40)
    args = ap.parse_args()

    corpus, graph = generate_synthetic(
        seed=args.seed, n_users=50, n_items=180, n_tags=60, n_triples=1200,
        alphabet="abcde", item_tag_affinity=0.8)

    spec = ExperimentSpec(alpha=0.0, k=5, sample=args.sample, seed=11,
                          prefix_lengths=(1, 2, 3, 4, 5), min_item_taggers=2)
    report = leave_one_out_precision(corpus, graph, spec)
    print(json.dumps({
        "curve": "p_at_5_by_prefix_length",
        "values": {str(l): round(v, 4) for l, v in report.p_at_k.items()},
        "trials": report.trials,
    }))

    by_theta = {}
    for theta in (0.0, 0.4, 0.8):
        g = filter_edges(graph, theta) if theta > 0 else graph
        rep = leave_one_out_precision(
            corpus, g, ExperimentSpec(alpha=0.0, k=5, sample=args.sample,
                                      seed=11, prefix_lengths=(3,),
                                      min_item_taggers=2))
        by_theta[str(theta)] = round(rep.p_at_k[3], 4)
    print(json.dumps({"curve": "p_at_5_by_theta", "values": by_theta}))

    index = build_index(corpus)
    trace = ndcg_trace(corpus, index, graph,
                       ExperimentSpec(alpha=0.0, sample=12, seed=13,
                                      prefix_lengths=(2,), min_item_taggers=2),
                       visited_caps=(0, 1, 2, 4, 8, 16, 32))
    print(json.dumps({
        "curve": "ndcg20_by_visited_users",
        "values": {str(cap): round(v, 4) for cap, v in trace.by_visited},
        "by_time_ms": {str(b): round(v, 4) for b, v in trace.by_time},
        "final": trace.final,
    }))


if __name__ == "__main__":
    main()
