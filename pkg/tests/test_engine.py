import math
import random

import pytest

from tagsearch.engine import (
    EngineConfig,
    GUARANTEED,
    POSSIBLE,
    Query,
    Session,
    execute,
    transform,
)
from tagsearch.reference import (
    reference_ranking,
    reference_topk,
    social_frequencies,
)
from tagsearch.synth import random_instance


def _cfg(**kw):
    kw.setdefault("time_budget_ms", None)
    return EngineConfig(**kw)


def test_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(k=0)
    with pytest.raises(ValueError):
        EngineConfig(alpha=1.5)
    with pytest.raises(ValueError):
        EngineConfig(tf_scale=0.0)
    with pytest.raises(ValueError):
        EngineConfig(score_transform="sqrt")


def test_transforms():
    assert transform("identity", 2.5) == 2.5
    assert transform("log1p", 2.5) == math.log1p(2.5)
    assert transform("log1p", 0.0) == 0.0


def test_social_frequency_running_values(corpus, graph):
    tid = corpus.tags.get("glasses")
    iid = corpus.items.get("i6")
    sf = social_frequencies(corpus, graph, "Alice", {tid})
    assert sf[(tid, iid)] == pytest.approx(1.5, abs=1e-9)  # Bob + Carol


def test_blend_running_value(corpus, graph, index):
    # alpha 0.2, unit scale: 0.2*2 + 0.8*1.5 over tf=2, sf=1.5
    cfg = _cfg(k=3, alpha=0.2, tf_scale=1.0)
    res = execute(corpus, index, graph, "Alice", Query(["glasses"]), cfg)
    assert res.exact
    top = res.entries[0]
    assert top.item == "i6"
    assert top.score_min == pytest.approx(1.6, abs=1e-9)


def test_prefix_maximizes_over_completions(corpus, graph, index):
    # for i4 under "g": gloomy 0.2, glasses 0.3, grunge 0.81, goth 0.41
    cfg = _cfg(k=5, alpha=0.0)
    res = execute(corpus, index, graph, "Alice", Query([], "g"), cfg)
    scores = {e.item: e.score_min for e in res.entries}
    assert scores["i4"] == pytest.approx(0.81, abs=1e-9)
    assert scores["i6"] == pytest.approx(1.5, abs=1e-9)
    assert res.entries[0].item == "i6"


def test_canonical_bounds_trace(corpus, graph, index):
    # Q = [style] + prefix "gl", alpha 0, k 2; social steps visit
    # Bob, Danny, Carol, Frank, Eve, and the run stops provably exact.
    cfg = _cfg(k=2, alpha=0.0)
    seen = []

    def observer(session):
        seen.append((session.visited, session.candidate_bounds(),
                     session.wildcard_bound()))

    res = execute(corpus, index, graph, "Alice", Query(["style"], "gl"),
                  cfg, observer=observer)

    v1, b1, _ = seen[0]          # after Bob
    assert v1 == 1
    assert b1["i6"] == (pytest.approx(1.8), pytest.approx(4.23))

    v2, b2, _ = seen[1]          # after Danny
    assert b2["i6"] == (pytest.approx(1.8), pytest.approx(3.6))

    v3, b3, w3 = seen[2]         # after Carol: i6 settles at 2.4
    assert b3["i6"] == (pytest.approx(2.4), pytest.approx(2.4))
    assert b3["i4"] == (pytest.approx(0.6), pytest.approx(1.8))
    assert w3 == pytest.approx(0.8)

    v4, b4, w4 = seen[3]         # after Frank
    assert b4["i4"] == (pytest.approx(1.0), pytest.approx(1.6))
    assert w4 == pytest.approx(0.6)

    v5, b5, _ = seen[4]          # after Eve: i4 settles, run can stop
    assert b5["i4"] == (pytest.approx(1.6), pytest.approx(1.6))

    assert res.exact
    assert res.visited_users == 5
    assert [(e.item, e.score_min) for e in res.entries] == [
        ("i6", pytest.approx(2.4)), ("i4", pytest.approx(1.6))]
    assert all(e.status == GUARANTEED for e in res.entries)


def test_bounds_narrow_monotonically(corpus, graph, index):
    cfg = _cfg(k=2, alpha=0.0)
    traces = {}

    def observer(session):
        for item, (lo, hi) in session.candidate_bounds().items():
            traces.setdefault(item, []).append((lo, hi))

    execute(corpus, index, graph, "Alice", Query(["style"], "gl"), cfg,
            observer=observer)
    for item, steps in traces.items():
        for (lo1, hi1), (lo2, hi2) in zip(steps, steps[1:]):
            assert lo2 >= lo1 - 1e-12
            assert hi2 <= hi1 + 1e-12


def test_matches_oracle_on_fixture_across_alphas(corpus, graph, index):
    for alpha in (0.0, 0.25, 0.5, 1.0):
        for q in [Query(["style"], "gl"), Query([], "st"),
                  Query(["glasses"]), Query(["style", "goth"], "s")]:
            cfg = _cfg(k=4, alpha=alpha)
            res = execute(corpus, index, graph, "Alice", q, cfg)
            assert res.exact
            want = reference_ranking(corpus, graph, "Alice", q, cfg)[:4]
            got = [(e.item, e.score_min) for e in res.entries]
            assert got == want


def test_textual_only_needs_no_network(corpus, graph, index):
    cfg = _cfg(k=3, alpha=1.0)
    res = execute(corpus, index, graph, "Alice", Query([], "st"), cfg)
    # pure tf: i2 street 4, i4 style 3, i2 stud/style ignored as duplicates
    assert [(e.item, e.score_min) for e in res.entries] == [
        ("i2", 4.0), ("i4", 3.0), ("i6", 1.0)]
    assert res.visited_users == 0


def test_alpha_zero_never_reads_lists(corpus, graph, index):
    cfg = _cfg(k=3, alpha=0.0)
    session = Session(corpus, index, graph, "Alice", cfg)
    for c in "st":
        session.append_char(c)
    session.run(budget_ms=None)
    # cursors may move only by candidate-head confirmation, never by the
    # textual branch; with alpha=0 available tf comes from drains alone
    assert session.visited > 0


def test_choose_branch_prefers_textual_at_high_alpha(corpus, graph, index):
    # (1-a)*mp = 0.45 < a*ts = 0.5 on the first step
    cfg = _cfg(k=2, alpha=0.5)
    first = {}

    def observer(session):
        if "visited" not in first:
            first["visited"] = session.visited

    execute(corpus, index, graph, "Alice", Query(["style"], "gl"), cfg,
            observer=observer)
    assert first["visited"] == 0  # first iteration was a textual step


def test_unknown_seeker_social_only_is_empty(corpus, graph, index):
    cfg = _cfg(k=3, alpha=0.0)
    res = execute(corpus, index, graph, "Zoe", Query([], "st"), cfg)
    assert res.exact
    assert res.entries == []


def test_unknown_seeker_with_text_weight(corpus, graph, index):
    cfg = _cfg(k=3, alpha=0.5)
    res = execute(corpus, index, graph, "Zoe", Query([], "st"), cfg)
    assert res.exact
    want = reference_ranking(corpus, graph, "Zoe", Query([], "st"), cfg)[:3]
    assert [(e.item, e.score_min) for e in res.entries] == want
    assert res.entries[0].item == "i2"  # street tf 4, halved


def test_absent_prefix_yields_empty(corpus, graph, index):
    cfg = _cfg(k=3, alpha=0.5)
    res = execute(corpus, index, graph, "Alice", Query([], "zz"), cfg)
    assert res.exact and res.entries == []


def test_empty_query_yields_empty(corpus, graph, index):
    cfg = _cfg(k=3, alpha=0.5)
    res = execute(corpus, index, graph, "Alice", Query([]), cfg)
    assert res.exact and res.entries == []


def test_duplicate_completed_terms_count_once(corpus, graph, index):
    cfg = _cfg(k=3, alpha=0.2)
    once = execute(corpus, index, graph, "Alice", Query(["style"]), cfg)
    twice = execute(corpus, index, graph, "Alice",
                    Query(["style", "style"]), cfg)
    assert [(e.item, e.score_min) for e in once.entries] == \
           [(e.item, e.score_min) for e in twice.entries]


def test_unknown_term_contributes_nothing(corpus, graph, index):
    cfg = _cfg(k=3, alpha=0.5)
    base = execute(corpus, index, graph, "Alice", Query(["style"]), cfg)
    noisy = execute(corpus, index, graph, "Alice",
                    Query(["style", "qqqq"]), cfg)
    assert [(e.item, e.score_min) for e in noisy.entries] == \
           [(e.item, e.score_min) for e in base.entries]


def test_log1p_transform_matches_oracle(corpus, graph, index):
    cfg = _cfg(k=4, alpha=0.3, score_transform="log1p")
    res = execute(corpus, index, graph, "Alice", Query(["style"], "g"), cfg)
    assert res.exact
    want = reference_ranking(corpus, graph, "Alice",
                             Query(["style"], "g"), cfg)[:4]
    assert [(e.item, e.score_min) for e in res.entries] == want


def test_tf_scale_matches_oracle(corpus, graph, index):
    cfg = _cfg(k=4, alpha=0.5, tf_scale=0.37)
    res = execute(corpus, index, graph, "Alice", Query(["style"], "gl"), cfg)
    assert res.exact
    want = reference_ranking(corpus, graph, "Alice",
                             Query(["style"], "gl"), cfg)[:4]
    assert [(e.item, e.score_min) for e in res.entries] == want


def test_visited_cap_gives_anytime_result(corpus, graph, index):
    capped = EngineConfig(k=2, alpha=0.0, time_budget_ms=None,
                          max_visited_users=2)
    res = execute(corpus, index, graph, "Alice", Query(["style"], "gl"),
                  capped)
    assert res.visited_users <= 2
    assert not res.exact
    exact = reference_ranking(corpus, graph, "Alice",
                              Query(["style"], "gl"), _cfg(k=2, alpha=0.0))
    exact_scores = dict(exact)
    top2 = {name for name, _ in exact[:2]}
    for e in res.entries:
        if e.status == GUARANTEED:
            assert e.item in top2
        if e.item in exact_scores:
            assert e.score_min - 1e-12 <= exact_scores[e.item] \
                   <= e.score_max + 1e-12


def test_anytime_entries_carry_valid_ranges(corpus, graph, index):
    capped = EngineConfig(k=3, alpha=0.0, time_budget_ms=None,
                          max_visited_users=1)
    res = execute(corpus, index, graph, "Alice", Query([], "g"), capped)
    assert res.entries, "candidates exist after one visit"
    for e in res.entries:
        assert e.score_min <= e.score_max + 1e-12
        assert e.status in (GUARANTEED, POSSIBLE)


def test_k_one(corpus, graph, index):
    cfg = _cfg(k=1, alpha=0.0)
    res = execute(corpus, index, graph, "Alice", Query([], "g"), cfg)
    assert res.exact
    assert [(e.item, e.score_min) for e in res.entries] == [
        ("i6", pytest.approx(1.5))]


def test_k_larger_than_candidates(corpus, graph, index):
    cfg = _cfg(k=50, alpha=0.0)
    res = execute(corpus, index, graph, "Alice", Query([], "g"), cfg)
    assert res.exact
    want = reference_ranking(corpus, graph, "Alice", Query([], "g"), cfg)
    assert [(e.item, e.score_min) for e in res.entries] == want


def test_seeded_instances_match_oracle():
    rng = random.Random(20240817)
    corpus, graph = random_instance(seed=91)
    from tagsearch.completion import build_index
    index = build_index(corpus)
    vocab = corpus.vocabulary()
    for alpha in (0.0, 0.5, 1.0):
        for k in (1, 5, 10):
            for _ in range(4):
                seeker = corpus.users.name(rng.randrange(len(corpus.users)))
                term = vocab[rng.randrange(len(vocab))]
                prefix = vocab[rng.randrange(len(vocab))][:rng.randint(1, 3)]
                q = Query([term], prefix)
                cfg = _cfg(k=k, alpha=alpha)
                res = execute(corpus, index, graph, seeker, q, cfg)
                assert res.exact
                want = reference_ranking(corpus, graph, seeker, q, cfg)[:k]
                got = [(e.item, e.score_min) for e in res.entries]
                assert got == want, (alpha, k, seeker, q)


def test_wildcard_covers_unseen_items(corpus, graph, index):
    # stop very early; no item outside the candidate set may score above
    # the wildcard upper bound
    capped = EngineConfig(k=2, alpha=0.0, time_budget_ms=None,
                          max_visited_users=1)
    session = Session(corpus, index, graph, "Alice", EngineConfig(
        k=2, alpha=0.0, time_budget_ms=None, max_visited_users=1))
    for c in "gl":
        session.append_char(c)
    session.run(budget_ms=None)
    ubw = session.wildcard_bound()
    inside = set(session.candidate_bounds())
    exact = dict(reference_ranking(corpus, graph, "Alice", Query([], "gl"),
                                   _cfg(k=2, alpha=0.0)))
    for item, score in exact.items():
        if item not in inside:
            assert score <= ubw + 1e-12
