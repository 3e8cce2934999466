"""Exhaustive reference implementation of the scoring model.

Scores every item by brute force: drain the whole proximity stream,
accumulate social frequencies per (tag, item), then evaluate the query
sum directly.  No index, no bounds, no early termination.  The engine
must agree with this module on every terminated run; tests rely on that.

Float determinism: social frequencies are accumulated in proximity
order (the same order the engine visits users), and the per-term blend
is written with the same expression shape the engine uses, so exact
results compare bitwise on identical inputs.
"""

from __future__ import annotations

from .engine import ResultEntry, TopKResult, GUARANTEED, transform
from .graph import MaxProduct, ProximityIterator


def _dedupe(terms):
    out = []
    for t in terms:
        if t not in out:
            out.append(t)
    return out


def social_frequencies(corpus, graph, seeker, relevant_tags, aggregator=None):
    """(tag id, item id) -> sf, accumulated in proximity order."""
    sf = {}
    uid = corpus.users.get(seeker)
    if graph is None or uid is None or uid >= len(graph.adj):
        return sf
    agg = aggregator or MaxProduct()
    for user, prox in ProximityIterator(graph, uid, agg):
        for iid, tid in corpus.p_space[user]:
            if tid in relevant_tags:
                key = (tid, iid)
                sf[key] = sf.get(key, 0.0) + prox
    return sf


def reference_scores(corpus, graph, seeker, query, config):
    """item id -> exact score (only items scoring > 0)."""
    a = config.alpha
    ts = config.tf_scale
    h = config.score_transform
    completed = _dedupe(query.completed_terms)
    prefix = query.active_prefix or ""
    completed_tids = [corpus.tags.get(t) for t in completed]
    completion_tids = []
    if prefix:
        completion_tids = [
            corpus.tags.get(t) for t in corpus.tags.names if t.startswith(prefix)
        ]
    relevant = {t for t in completed_tids if t is not None}
    relevant.update(completion_tids)
    sf = social_frequencies(corpus, graph, seeker, relevant, config.aggregator)
    items = set()
    for tid in relevant:
        items.update(corpus.tf_by_tag[tid].keys())
    scores = {}
    for iid in sorted(items):
        total = 0.0
        for tid in completed_tids:
            tf = corpus.tf_by_tag[tid].get(iid, 0) if tid is not None else 0
            sfv = sf.get((tid, iid), 0.0)
            total += transform(h, a * ts * tf + (1.0 - a) * sfv)
        if prefix:
            tf_m = 0
            sf_m = 0.0
            for tid in completion_tids:
                tf = corpus.tf_by_tag[tid].get(iid, 0)
                if tf > tf_m:
                    tf_m = tf
                sfv = sf.get((tid, iid), 0.0)
                if sfv > sf_m:
                    sf_m = sfv
            total += transform(h, a * ts * tf_m + (1.0 - a) * sf_m)
        if total > 0.0:
            scores[iid] = total
    return scores


def reference_topk(corpus, graph, seeker, query, config):
    """Exact top-k as a TopKResult, global tie-break score desc / id asc."""
    scores = reference_scores(corpus, graph, seeker, query, config)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    names = corpus.items.names
    entries = [
        ResultEntry(item=names[iid], score_min=s, score_max=s, status=GUARANTEED)
        for iid, s in ranked[: config.k]
    ]
    return TopKResult(entries=entries, exact=True)


def reference_ranking(corpus, graph, seeker, query, config):
    """Full ranking as (item name, score) pairs, best first."""
    scores = reference_scores(corpus, graph, seeker, query, config)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    names = corpus.items.names
    return [(names[iid], s) for iid, s in ranked]
