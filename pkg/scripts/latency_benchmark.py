"""Keystroke latency at scale: build a large corpus, type, measure.

Defaults reproduce the 1M-triple / 100k-user acceptance setting.
"""

import argparse
import json
import statistics
import time

from tagsearch.completion import build_index
from tagsearch.engine import EngineConfig, Session
from tagsearch.synth import generate_synthetic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--users", type=int, default=100_000)
    ap.add_argument("--items", type=int, default=200_000)
    ap.add_argument("--tags", type=int, default=5_000)
    ap.add_argument("--n-triples", type=int, default=1_005_000)
    ap.add_argument("--budget-ms", type=float, default=50.0)
    ap.add_argument("--sessions", type=int, default=12)
    args = ap.parse_args()

    t0 = time.perf_counter()
    corpus, graph = generate_synthetic(
        seed=args.seed, n_users=args.users, n_items=args.items,
        n_tags=args.tags, n_triples=args.n_triples)
    gen_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    index = build_index(corpus)
    index_s = time.perf_counter() - t0

    vocab = sorted(corpus.vocabulary())
    config = EngineConfig(k=10, alpha=0.0, time_budget_ms=args.budget_ms)
    latencies = []
    for s in range(args.sessions):
        word = vocab[(s * 131) % len(vocab)][:4]
        session = Session(corpus, index, graph, f"u{s * 17}", config)
        for ch in word:
            t0 = time.perf_counter()
            session.keystroke("char", ch)
            latencies.append((time.perf_counter() - t0) * 1000.0)
    latencies.sort()
    print(json.dumps({
        "triples": len(corpus._triples),
        "users": len(corpus.users),
        "generate_s": round(gen_s, 2),
        "index_s": round(index_s, 2),
        "keystrokes": len(latencies),
        "p50_ms": round(statistics.median(latencies), 2),
        "p95_ms": round(latencies[int(0.95 * (len(latencies) - 1))], 2),
        "max_ms": round(latencies[-1], 2),
    }))


if __name__ == "__main__":
    main()
