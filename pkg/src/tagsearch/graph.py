"""Weighted user graph and lazy extended-proximity iteration.

Extended proximity between a seeker s and any user v aggregates path
weights.  Two aggregators are provided: the maximum product of edge
weights over all paths, and an exponentially hop-penalized variant.  Both
are monotone (extending a path never increases its value), which makes a
best-first expansion correct: users are yielded in non-increasing
proximity order and the heap head bounds every user not yet yielded.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)


class MaxProduct:
    """Aggregate a path as the product of its edge weights."""

    def seed(self, weight):
        return weight

    def extend(self, value, weight):
        return value * weight


class ExpDecay:
    """Product of edge weights discounted by decay^(hops-1)."""

    def __init__(self, decay=0.7):
        if not 0.0 < decay <= 1.0:
            raise ValueError("decay must be in (0, 1]")
        self.decay = decay

    def seed(self, weight):
        return weight

    def extend(self, value, weight):
        return value * weight * self.decay


class SimilarityGraph:
    """Undirected weighted graph over interned user ids."""

    def __init__(self, n_users):
        self.adj = [[] for _ in range(n_users)]

    def add_edge(self, u, v, weight):
        if u == v:
            return
        if not 0.0 < weight <= 1.0:
            raise ValueError(f"edge weight must be in (0, 1], got {weight}")
        self.adj[u].append((v, weight))
        self.adj[v].append((u, weight))

    def neighbors(self, u):
        return self.adj[u]

    def n_edges(self):
        return sum(len(a) for a in self.adj) // 2


class ProximityIterator:
    """Best-first traversal yielding (user, proximity) in decreasing order.

    The seeker itself is never yielded (its self-proximity is 0 by
    convention).  `bound()` returns a value >= the proximity of every user
    not yet yielded; once the frontier is empty it is 0.  Ties are broken
    by ascending user id so traversal order is deterministic.
    """

    def __init__(self, graph: SimilarityGraph, seeker, aggregator=None):
        self.graph = graph
        self.seeker = seeker
        self.agg = aggregator or MaxProduct()
        self.settled = {seeker}
        self.heap = []
        for v, w in graph.neighbors(seeker):
            heapq.heappush(self.heap, (-self.agg.seed(w), v))
        self._clean()

    def _clean(self):
        while self.heap and self.heap[0][1] in self.settled:
            heapq.heappop(self.heap)

    def bound(self):
        """Upper bound on the proximity of any not-yet-yielded user."""
        return -self.heap[0][0] if self.heap else 0.0

    def __iter__(self):
        return self

    def __next__(self):
        self._clean()
        if not self.heap:
            raise StopIteration
        neg, user = heapq.heappop(self.heap)
        value = -neg
        self.settled.add(user)
        for w_user, w in self.graph.neighbors(user):
            if w_user not in self.settled:
                heapq.heappush(self.heap, (-self.agg.extend(value, w), w_user))
        self._clean()
        return user, value


def proximity_map(graph, seeker, aggregator=None):
    """Exhaust the iterator into a dict user -> proximity."""
    return dict(ProximityIterator(graph, seeker, aggregator))


def load_edges(source, corpus):
    """Read user<TAB>user<TAB>weight TSV into a SimilarityGraph.

    Endpoints not yet known to the corpus are interned (with empty
    personal spaces) so purely social users still participate in
    proximity propagation.  Duplicate edges keep the larger weight.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return load_edges(list(fh), corpus)
    rows = []
    for raw in source:
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            continue
        a, b, w = parts[0].strip(), parts[1].strip(), parts[2]
        try:
            weight = float(w)
        except ValueError:
            continue
        if not a or not b or a == b or not 0.0 < weight <= 1.0:
            continue
        rows.append((corpus.ensure_user(a), corpus.ensure_user(b), weight))
    graph = SimilarityGraph(len(corpus.users))
    best = {}
    for u, v, w in rows:
        key = (u, v) if u < v else (v, u)
        if w > best.get(key, 0.0):
            best[key] = w
    for (u, v), w in best.items():
        graph.add_edge(u, v, w)
    return graph


def write_edges(path, graph, corpus):
    """Write the graph as user<TAB>user<TAB>weight lines (one per edge)."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, nbrs in enumerate(graph.adj):
            for v, w in nbrs:
                if u < v:
                    fh.write(f"{corpus.users.name(u)}\t{corpus.users.name(v)}\t{w!r}\n")


def filter_edges(graph, theta):
    """New graph keeping only edges with weight >= theta."""
    out = SimilarityGraph(len(graph.adj))
    for u, nbrs in enumerate(graph.adj):
        for v, w in nbrs:
            if u < v and w >= theta:
                out.add_edge(u, v, w)
    return out


def _dice(sa, sb):
    if not sa or not sb:
        return 0.0
    inter = len(sa & sb)
    if inter == 0:
        return 0.0
    return 2.0 * inter / (len(sa) + len(sb))


@dataclass
class NetworkSpec:
    """How to derive user-user similarity edges from the corpus.

    kind: 'social' uses explicit edges as-is; 'itemtag' overlaps users'
    (item, tag) pair sets; 'tag' overlaps their tag sets.  Derived kinds
    score all user pairs sharing at least one feature with the Dice
    coefficient.
    """

    kind: str = "social"
    theta: float = 0.0


def dice_network(corpus, kind):
    """Similarity graph from corpus behaviour, Dice over feature sets."""
    if kind == "itemtag":
        feats = [set(pairs) for pairs in corpus.p_space]
    elif kind == "tag":
        feats = [{t for _, t in pairs} for pairs in corpus.p_space]
    else:
        raise ValueError(f"unknown derived network kind: {kind}")
    owners = {}
    for uid, fs in enumerate(feats):
        for f in fs:
            owners.setdefault(f, []).append(uid)
    pairs = set()
    for users_of in owners.values():
        for i in range(len(users_of)):
            for j in range(i + 1, len(users_of)):
                pairs.add((users_of[i], users_of[j]))
    graph = SimilarityGraph(len(corpus.users))
    for u, v in pairs:
        w = _dice(feats[u], feats[v])
        if w > 0.0:
            graph.add_edge(u, v, w)
    return graph


def build_network(corpus, spec: NetworkSpec, edges_source=None):
    """Assemble the seeker network per spec, applying the theta filter.

    For kind 'social', edges_source is an already-built SimilarityGraph
    or anything load_edges accepts; derived kinds ignore it.
    """
    if spec.kind == "social":
        if edges_source is None:
            raise ValueError("social network requires an edges source")
        if isinstance(edges_source, SimilarityGraph):
            graph = edges_source
        else:
            graph = load_edges(edges_source, corpus)
    else:
        graph = dice_network(corpus, spec.kind)
    if spec.theta > 0.0:
        graph = filter_edges(graph, spec.theta)
    return graph
