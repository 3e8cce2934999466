"""Experiment harness: leave-one-out precision, anytime quality, scaling.

All procedures are seed-deterministic.  Leave-one-out trials remove one
tagging triple, then measure at which rank the engine retrieves the
item back for its own tagger while the tag is typed letter by letter.
The user network is always built from the full dataset; corpora derived
per trial share the full corpus' id space so the graph stays valid.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from .completion import build_index
from .engine import EngineConfig, Query, execute
from .reference import social_frequencies


@dataclass
class ExperimentSpec:
    alpha: float = 0.0
    k: int = 5
    prefix_lengths: tuple = (1, 2, 3, 4, 5)
    sample: int = 100
    seed: int = 7
    budget_ms: float | None = None
    two_word: bool = False
    min_item_taggers: int = 1
    min_user_items: int = 1
    tf_scale: float | None = None
    score_transform: str = "identity"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.sample < 1:
            raise ValueError("sample must be >= 1")
        if not self.prefix_lengths or any(l < 1 for l in self.prefix_lengths):
            raise ValueError("prefix lengths must be >= 1")
        if self.min_item_taggers < 1 or self.min_user_items < 1:
            raise ValueError("eligibility filters must be >= 1")


@dataclass
class PrecisionReport:
    p_at_k: dict          # prefix length -> fraction of hits
    trials: int
    spec: ExperimentSpec


@dataclass
class NdcgTrace:
    by_visited: list      # (visited-user cap, mean NDCG@20)
    by_time: list         # (budget ms, mean NDCG@20), budgets ascending
    final: float          # NDCG after full termination (must be 1.0)
    trials: int


def _engine_config(spec, corpus=None, graph=None, k=None):
    ts = spec.tf_scale
    if ts is None:
        ts = compute_tf_scale(corpus, graph, spec) if spec.alpha > 0 else 1.0
    return EngineConfig(
        k=k or spec.k,
        alpha=spec.alpha,
        tf_scale=ts,
        score_transform=spec.score_transform,
        time_budget_ms=spec.budget_ms,
    )


def compute_tf_scale(corpus, graph, spec, probes=40):
    """Scale factor putting tf and sf on comparable footing.

    Ratio of the mean social frequency to the mean term frequency over a
    seed-deterministic sample of (seeker, tag) probes.
    """
    rng = random.Random(spec.seed * 31 + 5)
    triples = list(corpus.iter_triples())
    if not triples:
        return 1.0
    sf_sum = sf_n = tf_sum = tf_n = 0
    for _ in range(min(probes, len(triples))):
        user, _, tag = triples[rng.randrange(len(triples))]
        tid = corpus.tags.get(tag)
        sf = social_frequencies(corpus, graph, user, {tid})
        for v in sf.values():
            sf_sum += v
            sf_n += 1
        for v in corpus.tf_by_tag[tid].values():
            tf_sum += v
            tf_n += 1
    if sf_n == 0 or tf_n == 0 or sf_sum == 0 or tf_sum == 0:
        return 1.0
    return (sf_sum / sf_n) / (tf_sum / tf_n)


def _eligible_triples(corpus, spec):
    taggers = corpus.distinct_users_per_item()
    items_of = corpus.distinct_items_per_user()
    out = []
    for uid, iid, tid in corpus._triples:
        tag = corpus.tags.name(tid)
        if len(tag) < 3:
            continue
        if taggers.get(iid, 0) < spec.min_item_taggers:
            continue
        if items_of.get(uid, 0) < spec.min_user_items:
            continue
        out.append((corpus.users.name(uid), corpus.items.name(iid), tag))
    return out


def _rank_of(result, item):
    for pos, entry in enumerate(result.entries):
        if entry.item == item:
            return pos
    return None


def leave_one_out_precision(corpus, graph, spec: ExperimentSpec) -> PrecisionReport:
    """P@k per prefix length over seed-sampled leave-one-out trials."""
    rng = random.Random(spec.seed)
    eligible = _eligible_triples(corpus, spec)
    if not eligible:
        raise ValueError("corpus too small to sample leave-one-out trials")
    n = min(spec.sample, len(eligible))
    trials = rng.sample(eligible, n)
    config = _engine_config(corpus=corpus, graph=graph, spec=spec)
    hits = {l: 0 for l in spec.prefix_lengths}
    counted = 0
    for user, item, tag in trials:
        held_out = corpus.remove_triple(user, item, tag)
        trial_corpus = held_out
        query_tag = tag
        if spec.two_word:
            others = sorted(
                t for u2, i2, t in corpus.iter_triples()
                if u2 == user and i2 == item and t != tag
            )
            if not others:
                continue
            w1 = others[rng.randrange(len(others))]
            keep = {corpus.items.name(i) for i in held_out.items_with_tag(w1)}
            if item not in keep:
                continue
            trial_corpus = held_out.restrict_items(keep)
        index = build_index(trial_corpus)
        counted += 1
        for l in spec.prefix_lengths:
            prefix = query_tag[: min(l, len(query_tag))]
            result = execute(trial_corpus, index, graph, user,
                             Query([], prefix), config, budget_ms=spec.budget_ms)
            rank = _rank_of(result, item)
            if rank is not None and rank < spec.k:
                hits[l] += 1
    if counted == 0:
        raise ValueError("no usable trials in the sample")
    return PrecisionReport(
        p_at_k={l: hits[l] / counted for l in spec.prefix_lengths},
        trials=counted,
        spec=spec,
    )


def ndcg_at_20(result, exact_rank):
    """NDCG@20 of an anytime result against exact ranks (0-based)."""
    positions = min(20, len(exact_rank)) or 1
    dcg = 0.0
    for pos, entry in enumerate(result.entries[:20]):
        rank = exact_rank.get(entry.item)
        rel = max(0, 20 - rank) if rank is not None else 0
        dcg += rel / math.log2(pos + 2)
    ideal = sorted(exact_rank.values())[:20]
    idcg = sum(max(0, 20 - r) / math.log2(pos + 2) for pos, r in enumerate(ideal))
    return dcg / idcg if idcg > 0 else 0.0


def ndcg_trace(corpus, index, graph, spec: ExperimentSpec,
               visited_caps=(0, 1, 2, 4, 8, 16, 32, 64),
               time_budgets_ms=(0.05, 0.5, 5.0)) -> NdcgTrace:
    """Mean NDCG@20 of anytime answers under visited-user budgets.

    Also samples wall-clock budgets; those rows are measurements, not
    deterministic, and carry no monotonicity guarantee.
    """
    rng = random.Random(spec.seed)
    eligible = _eligible_triples(corpus, spec)
    if not eligible:
        raise ValueError("corpus too small to sample queries")
    n = min(spec.sample, len(eligible))
    trials = rng.sample(eligible, n)
    config = _engine_config(corpus=corpus, graph=graph, spec=spec, k=20)
    l = spec.prefix_lengths[0]
    sums = {cap: 0.0 for cap in visited_caps}
    time_sums = {b: 0.0 for b in time_budgets_ms}
    final_sum = 0.0
    for user, _, tag in trials:
        prefix = tag[: min(l, len(tag))]
        query = Query([], prefix)
        exact = execute(corpus, index, graph, user, query, config, budget_ms=None)
        exact_rank = {e.item: pos for pos, e in enumerate(exact.entries)}
        for cap in visited_caps:
            capped = EngineConfig(
                k=20, alpha=config.alpha, tf_scale=config.tf_scale,
                score_transform=config.score_transform,
                time_budget_ms=None, max_visited_users=cap,
            )
            result = execute(corpus, index, graph, user, query, capped,
                             budget_ms=None)
            sums[cap] += ndcg_at_20(result, exact_rank)
        for budget in time_budgets_ms:
            result = execute(corpus, index, graph, user, query, config,
                             budget_ms=budget)
            time_sums[budget] += ndcg_at_20(result, exact_rank)
        final_sum += ndcg_at_20(exact, exact_rank)
    return NdcgTrace(
        by_visited=[(cap, sums[cap] / n) for cap in visited_caps],
        by_time=[(b, time_sums[b] / n) for b in sorted(time_budgets_ms)],
        final=final_sum / n,
        trials=n,
    )


def scalability_sweep(corpus, graph, spec: ExperimentSpec,
                      chunks=(0.2, 0.4, 0.6, 0.8, 1.0),
                      prefix_lengths=(2, 3, 4, 5), queries=10):
    """Mean time to the exact answer on cumulative corpus chunks.

    Chunks follow triple insertion order (the corpus' natural total
    order).  Returns rows of (fraction, prefix length, mean seconds).
    """
    rng = random.Random(spec.seed)
    total = len(corpus._triples)
    eligible = _eligible_triples(corpus, spec)
    if not eligible:
        raise ValueError("corpus too small for a scalability sweep")
    sample = rng.sample(eligible, min(queries, len(eligible)))
    config = _engine_config(corpus=corpus, graph=graph, spec=spec)
    rows = []
    for fraction in chunks:
        cutoff = max(1, int(total * fraction))
        kept = set(corpus._triples[:cutoff])
        chunk_corpus = corpus._rebuild(lambda key: key in kept)
        chunk_index = build_index(chunk_corpus)
        for l in prefix_lengths:
            elapsed = 0.0
            for user, _, tag in sample:
                prefix = tag[: min(l, len(tag))]
                start = time.perf_counter()
                execute(chunk_corpus, chunk_index, graph, user,
                        Query([], prefix), config, budget_ms=None)
                elapsed += time.perf_counter() - start
            rows.append({
                "fraction": fraction,
                "prefix_length": l,
                "mean_seconds": elapsed / len(sample),
            })
    return rows
