import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagsearch.corpus import Corpus
from tagsearch.graph import (
    ExpDecay,
    MaxProduct,
    NetworkSpec,
    ProximityIterator,
    SimilarityGraph,
    build_network,
    dice_network,
    filter_edges,
    load_edges,
    proximity_map,
)

from .helpers import drain_proximity, simple_path_proximity


def test_add_edge_validation():
    g = SimilarityGraph(3)
    with pytest.raises(ValueError):
        g.add_edge(0, 1, 0.0)
    with pytest.raises(ValueError):
        g.add_edge(0, 1, 1.5)
    g.add_edge(0, 0, 0.5)  # self loops are dropped, not an error
    assert g.n_edges() == 0
    g.add_edge(0, 1, 1.0)
    assert g.n_edges() == 1
    assert (1, 1.0) in g.neighbors(0) and (0, 1.0) in g.neighbors(1)


def test_fixture_proximity_order(graph, corpus):
    got = drain_proximity(graph, corpus.users.get("Alice"))
    names = [(corpus.users.name(u), v) for u, v in got]
    assert names == [
        ("Bob", 0.9), ("Danny", pytest.approx(0.81)), ("Carol", 0.6),
        ("Frank", 0.4), ("Eve", 0.3), ("George", 0.2), ("Ida", 0.16),
        ("Jim", 0.07), ("Holly", 0.01),
    ]


def test_iterator_bound_is_sound(graph, corpus):
    it = ProximityIterator(graph, corpus.users.get("Alice"), MaxProduct())
    seen = []
    while True:
        bound = it.bound()
        try:
            user, value = next(it)
        except StopIteration:
            assert it.bound() == 0.0
            break
        assert value <= bound + 1e-12
        if seen:
            assert value <= seen[-1][1] + 1e-12
        seen.append((user, value))
    assert len(seen) == 9


def test_seeker_never_yielded(graph, corpus):
    alice = corpus.users.get("Alice")
    assert all(u != alice for u, _ in drain_proximity(graph, alice))


def _random_graph(rng, n):
    g = SimilarityGraph(n)
    seen = set()
    for _ in range(rng.randint(n - 1, n * 2)):
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        g.add_edge(u, v, rng.randint(1, 64) / 64.0)
    return g


@pytest.mark.parametrize("agg_name", ["maxprod", "decay"])
def test_iterator_matches_simple_path_oracle(agg_name):
    rng = random.Random(hash(agg_name) & 0xFFFF)
    for trial in range(40):
        n = rng.randint(2, 10)
        g = _random_graph(rng, n)
        agg = MaxProduct() if agg_name == "maxprod" else ExpDecay(0.75)
        seeker = rng.randrange(n)
        got = dict(drain_proximity(g, seeker, agg))
        want = simple_path_proximity(g, seeker, agg)
        assert got.keys() == want.keys()
        for u in want:
            assert got[u] == pytest.approx(want[u], abs=1e-12)


def test_decay_one_equals_maxproduct():
    rng = random.Random(99)
    for _ in range(20):
        g = _random_graph(rng, rng.randint(2, 12))
        seeker = 0
        assert drain_proximity(g, seeker, ExpDecay(1.0)) == \
               drain_proximity(g, seeker, MaxProduct())


def test_decay_penalizes_hops():
    g = SimilarityGraph(3)
    g.add_edge(0, 1, 1.0)
    g.add_edge(1, 2, 1.0)
    prox = proximity_map(g, 0, ExpDecay(0.5))
    assert prox[1] == pytest.approx(1.0)   # one hop: no decay factor yet
    assert prox[2] == pytest.approx(0.5)


def test_proximity_tie_breaks_ascending_id():
    g = SimilarityGraph(4)
    g.add_edge(0, 2, 0.5)
    g.add_edge(0, 1, 0.5)
    g.add_edge(0, 3, 0.5)
    order = [u for u, _ in drain_proximity(g, 0)]
    assert order == [1, 2, 3]


def test_load_edges_interning_and_duplicates(tmp_path):
    c = Corpus([("X", "i1", "t1")])
    path = tmp_path / "edges.tsv"
    path.write_text("# e\nX\tY\t0.5\nY\tX\t0.7\nX\tZ\t0.2\nX\tX\t0.9\n")
    g = load_edges(str(path), c)
    x, y = c.users.get("X"), c.users.get("Y")
    assert x == 0 and y is not None  # edge-only users are interned
    weights = dict(g.neighbors(x))
    assert weights[y] == 0.7  # duplicate edge keeps the larger weight
    assert len(g.adj) == len(c.users) == 3
    assert x not in dict(g.neighbors(x))  # self edge dropped


def test_filter_edges_threshold(graph):
    g = filter_edges(graph, 0.3)
    kept = {w for adj in g.adj for _, w in adj}
    assert kept and min(kept) >= 0.3
    assert g.n_edges() < graph.n_edges()


def _pair_corpus():
    return Corpus([
        ("a", "i1", "red"), ("b", "i1", "red"),
        ("b", "i2", "blue"), ("c", "i2", "blue"),
        ("d", "i3", "green"),
    ])


def test_dice_itemtag_network():
    c = _pair_corpus()
    g = dice_network(c, "itemtag")
    a, b, cc, d = (c.users.get(u) for u in "abcd")
    wab = dict(g.neighbors(a)).get(b)
    # a and b share their only (i1, red) pair for a: 2*1/(1+2)
    assert wab == pytest.approx(2 / 3)
    assert dict(g.neighbors(a)).get(cc) is None  # no shared pair
    assert g.neighbors(d) == []


def test_dice_tag_network():
    c = _pair_corpus()
    g = dice_network(c, "tag")
    a, cc = c.users.get("a"), c.users.get("c")
    # a={red}, c={blue}: nothing shared; b={red,blue} links to both
    assert dict(g.neighbors(a)).get(cc) is None
    b = c.users.get("b")
    assert dict(g.neighbors(a))[b] == pytest.approx(2 / 3)


def test_build_network_social_passthrough(graph):
    spec = NetworkSpec(kind="social", theta=0.0)
    assert build_network(None, spec, graph) is graph


def test_build_network_theta(corpus, graph):
    spec = NetworkSpec(kind="social", theta=0.5)
    g = build_network(corpus, spec, graph)
    kept = {w for adj in g.adj for _, w in adj}
    assert kept == {0.9, 0.6}


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_iterator_oracle_property(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    g = _random_graph(rng, n)
    seeker = rng.randrange(n)
    agg = rng.choice([MaxProduct(), ExpDecay(0.5), ExpDecay(0.9)])
    got = dict(drain_proximity(g, seeker, agg))
    want = simple_path_proximity(g, seeker, agg)
    assert got.keys() == want.keys()
    for u in want:
        assert got[u] == pytest.approx(want[u], abs=1e-12)
