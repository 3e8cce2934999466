import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagsearch.completion import IndexView, build_index, open_cursor, top_tf
from tagsearch.corpus import Corpus
from tagsearch.synth import generate_synthetic

from .helpers import assert_heap_property, virtual_list_oracle


def test_locate_spans(index, corpus):
    vocab = sorted(corpus.vocabulary())
    for prefix in ["g", "gl", "glasses", "s", "st", "str", "style", "h"]:
        node = index.locate(prefix)
        want = [t for t in vocab if t.startswith(prefix)]
        assert node is not None, prefix
        assert vocab[node.lo:node.hi] == want
    assert index.locate("zzz") is None
    assert index.locate("styx") is None
    assert index.locate("glassesx") is None


def test_whole_vocab_span(index, corpus):
    node = index.locate("")
    assert node is index.root
    assert (node.lo, node.hi) == (0, len(corpus.vocabulary()))


def test_virtual_head_example(index, corpus):
    # the most frequent entry under "st" is street on i2 with tf 4
    view = IndexView(index)
    cursor = open_cursor(view, "st")
    item, tag, tf = cursor.peek()
    assert (corpus.items.name(item), tag, tf) == ("i2", "street", 4)


def test_cursor_drain_matches_oracle(index, corpus):
    view = IndexView(index)
    cursor = open_cursor(view, "st")
    got = []
    while cursor.peek() is not None:
        got.append(cursor.advance())
    assert got == virtual_list_oracle(corpus, "st")


def test_cursor_emission_non_increasing(index):
    view = IndexView(index)
    cursor = open_cursor(view, "g")
    tfs = []
    while cursor.peek() is not None:
        tfs.append(cursor.advance()[2])
    assert tfs == sorted(tfs, reverse=True)
    assert cursor.advance() is None


def test_open_cursor_unknown_prefix(index):
    assert open_cursor(index, "qqq") is None


def test_top_tf(index, corpus):
    assert top_tf(index, "street") == 4
    assert top_tf(index, "style") == 3
    assert top_tf(index, "st") == 4      # best under the prefix
    assert top_tf(index, "zz") == 0


def test_view_isolation(index):
    a, b = IndexView(index), IndexView(index)
    ca = open_cursor(a, "st")
    for _ in range(3):
        ca.advance_raw()
    cb = open_cursor(b, "st")
    assert cb.peek_raw() != ca.peek_raw()
    assert b.pos == [0] * len(index.vocab)


def test_advance_rewind_roundtrip(index):
    view = IndexView(index)
    rank = index.rank_of_name["style"]
    before = view.list_head(rank)
    view.advance_list(rank)
    assert view.list_head(rank) != before
    view.rewind_list(rank)
    assert view.list_head(rank) == before
    assert_heap_property(view)


def _words(rng, n):
    out = set()
    while len(out) < n:
        out.add("".join(rng.choice("abcd")
                        for _ in range(rng.randint(1, 6))))
    return sorted(out)


def _random_corpus(rng, n_tags):
    tags = _words(rng, n_tags)
    rows = []
    for _ in range(rng.randint(n_tags, n_tags * 6)):
        rows.append((f"u{rng.randrange(8)}", f"i{rng.randrange(30)}",
                     tags[rng.randrange(len(tags))]))
    return Corpus(rows)


def test_random_spans_and_heads():
    rng = random.Random(1234)
    for _ in range(50):
        c = _random_corpus(rng, rng.randint(1, 25))
        index = build_index(c)
        vocab = sorted(c.vocabulary())
        view = IndexView(index)
        assert_heap_property(view)
        for _ in range(10):
            word = vocab[rng.randrange(len(vocab))]
            prefix = word[: rng.randint(1, len(word))]
            node = index.locate(prefix)
            want = [t for t in vocab if t.startswith(prefix)]
            if not want:
                assert node is None
                continue
            assert vocab[node.lo:node.hi] == want


def test_heap_property_after_every_advance():
    rng = random.Random(77)
    for _ in range(20):
        c = _random_corpus(rng, rng.randint(2, 15))
        index = build_index(c)
        view = IndexView(index)
        ranks = [r for r in range(len(index.vocab)) if index.lists[r]]
        for _ in range(30):
            rank = rng.choice(ranks)
            view.advance_list(rank)
            assert_heap_property(view)


def test_drain_oracle_property_random():
    rng = random.Random(4242)
    for _ in range(30):
        c = _random_corpus(rng, rng.randint(2, 20))
        index = build_index(c)
        vocab = sorted(c.vocabulary())
        word = vocab[rng.randrange(len(vocab))]
        prefix = word[: rng.randint(1, len(word))]
        view = IndexView(index)
        cursor = open_cursor(view, prefix)
        got = []
        while cursor.peek() is not None:
            got.append(cursor.advance())
        assert got == virtual_list_oracle(c, prefix)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.text(alphabet="abc", min_size=1, max_size=5),
                min_size=1, max_size=15),
       st.text(alphabet="abc", min_size=1, max_size=3))
def test_span_equals_filter(tags, prefix):
    rows = [(f"u{i % 3}", f"i{i % 5}", t) for i, t in enumerate(tags)]
    c = Corpus(rows)
    index = build_index(c)
    vocab = sorted(c.vocabulary())
    node = index.locate(prefix)
    want = [t for t in vocab if t.startswith(prefix)]
    if node is None:
        assert want == []
    else:
        assert vocab[node.lo:node.hi] == want


def test_synthetic_index_consistency():
    c, _ = generate_synthetic(seed=5, n_users=20, n_items=60,
                              n_tags=30, n_triples=200)
    index = build_index(c)
    view = IndexView(index)
    assert_heap_property(view)
    for rank, rows in enumerate(index.lists):
        tfs = [tf for _, tf in rows]
        assert tfs == sorted(tfs, reverse=True)
        tid = index.tag_at_rank[rank]
        assert {i for i, _ in rows} == set(c.tf_by_tag[tid].keys())
