"""Deterministic synthetic corpora and user graphs for experiments.

Tag and item popularity follow truncated Zipf laws; the user graph is a
Watts-Strogatz-style ring with rewiring.  Edge weights are drawn on a
1/64 grid so that proximity products and social-frequency sums stay
exactly representable: result scores are then independent of summation
order, which keeps incremental and batch runs bit-identical.

Everything is a pure function of the seed and the size parameters.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus
from .graph import SimilarityGraph

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def _zipf_choice(rng, n, size, s):
    weights = 1.0 / np.power(np.arange(1, n + 1, dtype=np.float64), s)
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, rng.random(size), side="right")


def _make_words(rng, n, min_len=3, max_len=9, alphabet=_ALPHABET):
    words = []
    seen = set()
    for _ in range(200):
        need = n - len(words)
        if need <= 0:
            break
        lengths = rng.integers(min_len, max_len + 1, size=need)
        letters = rng.integers(0, len(alphabet), size=int(lengths.sum()))
        pos = 0
        for ln in lengths:
            w = "".join(alphabet[c] for c in letters[pos:pos + ln])
            pos += ln
            if w not in seen:
                seen.add(w)
                words.append(w)
    if len(words) < n:
        raise ValueError(f"cannot generate {n} distinct tags in [{min_len},{max_len}] letters")
    return words


def small_world_graph(rng, n_users, neighbors=4, rewire=0.1):
    """Ring lattice with rewiring; weights on the 1/64 grid."""
    if n_users < 2:
        return SimilarityGraph(max(n_users, 0))
    half = max(1, neighbors // 2)
    edges = set()
    for u in range(n_users):
        for d in range(1, half + 1):
            v = (u + d) % n_users
            if u == v:
                continue
            if rng.random() < rewire:
                v = int(rng.integers(0, n_users))
                tries = 0
                while (v == u or (min(u, v), max(u, v)) in edges) and tries < 8:
                    v = int(rng.integers(0, n_users))
                    tries += 1
                if v == u or (min(u, v), max(u, v)) in edges:
                    continue
            edges.add((min(u, v), max(u, v)))
    graph = SimilarityGraph(n_users)
    order = sorted(edges)
    weights = rng.integers(1, 65, size=len(order)) / 64.0
    for (u, v), w in zip(order, weights):
        graph.add_edge(u, v, float(w))
    return graph


def generate_synthetic(seed, n_users, n_items, n_tags, n_triples,
                       graph_model="small-world", tag_s=1.05, item_s=0.9,
                       neighbors=4, rewire=0.1, alphabet=_ALPHABET,
                       item_tag_affinity=0.0):
    """Seed-deterministic (Corpus, SimilarityGraph) pair.

    Raises ValueError on infeasible size combinations.  The corpus may
    contain fewer than n_triples unique triples (duplicates collapse).
    A narrow alphabet produces vocabularies with long shared prefixes.
    With item_tag_affinity > 0, that fraction of triples use the item's
    assigned dominant tag instead of a fresh popularity draw, so tag
    choice correlates with the item the way characteristic labels do.
    """
    if min(n_users, n_items, n_tags) < 1 or n_triples < 0:
        raise ValueError("sizes must be >= 1 (n_triples >= 0)")
    if graph_model != "small-world":
        raise ValueError(f"unknown graph model: {graph_model!r}")
    if not 0.0 <= item_tag_affinity <= 1.0:
        raise ValueError("item_tag_affinity must be in [0, 1]")
    rng = np.random.default_rng(seed)
    words = _make_words(rng, n_tags, alphabet=alphabet)
    users = _zipf_choice(rng, n_users, n_triples, 0.5)
    items = _zipf_choice(rng, n_items, n_triples, item_s)
    tags = _zipf_choice(rng, n_tags, n_triples, tag_s)
    if item_tag_affinity > 0.0:
        # extra draws only on this path: the default stream is unchanged
        assigned = _zipf_choice(rng, n_tags, n_items, tag_s)
        mix = rng.random(n_triples)
        tags = np.where(mix < item_tag_affinity, assigned[items], tags)
    rows = [
        (f"u{users[j]}", f"i{items[j]}", words[tags[j]])
        for j in range(n_triples)
    ]
    corpus = Corpus(rows)
    for j in range(n_users):
        corpus.ensure_user(f"u{j}")
    graph_ids = small_world_graph(rng, n_users, neighbors=neighbors, rewire=rewire)
    # remap ring ids (0..n_users-1 in name order) onto corpus user ids
    graph = SimilarityGraph(len(corpus.users))
    uid = [corpus.users.get(f"u{j}") for j in range(n_users)]
    for u in range(n_users):
        for v, w in graph_ids.adj[u]:
            if u < v:
                graph.add_edge(uid[u], uid[v], w)
    return corpus, graph


def random_instance(seed, n_users=30, n_items=120, n_tags=40, n_triples=600,
                    neighbors=4, rewire=0.2):
    """Small corpus + graph for randomized equivalence tests."""
    return generate_synthetic(seed, n_users, n_items, n_tags, n_triples,
                              neighbors=neighbors, rewire=rewire)
