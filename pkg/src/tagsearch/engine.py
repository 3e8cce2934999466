"""Network-aware as-you-type top-k search engine.

A query is a sequence of completed terms plus an active prefix.  Every
item is scored per Eq.-style OR semantics: the sum over query terms of
h(alpha * tf_scale * tf + (1 - alpha) * sf), where sf is the sum of the
seeker's extended proximities to the users who tagged the item with the
term, and the prefix term maximizes tf and sf independently over all
tags completing the prefix.

The engine explores the user network best-first and the inverted lists
in tf order, maintaining sound [min, max] score ranges per candidate
plus a wildcard bound covering every unseen item, and stops as soon as
the top-k is provably exact.  A session carries all of this state across
keystrokes, so each keystroke refines rather than restarts the search,
and a ranked anytime answer can be extracted whenever the per-keystroke
time budget runs out.
"""

from __future__ import annotations

import bisect
import heapq
import math
import time
from dataclasses import dataclass, field

from .completion import IndexView
from .graph import MaxProduct, ProximityIterator

IDENTITY = "identity"
LOG1P = "log1p"

GUARANTEED = "guaranteed"
POSSIBLE = "possible"

SOCIAL = "social"
TEXTUAL = "textual"


def transform(name, value):
    """Per-term positive monotone score transform."""
    if name == LOG1P:
        return math.log1p(value)
    return value


@dataclass
class EngineConfig:
    k: int = 10
    alpha: float = 0.0
    tf_scale: float = 1.0
    aggregator: object = None
    score_transform: str = IDENTITY
    time_budget_ms: float | None = 50.0
    max_visited_users: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.tf_scale <= 0.0:
            raise ValueError("tf_scale must be positive")
        if self.score_transform not in (IDENTITY, LOG1P):
            raise ValueError(f"unknown score transform: {self.score_transform}")


@dataclass
class Query:
    completed_terms: list
    active_prefix: str = ""


@dataclass
class ResultEntry:
    item: str
    score_min: float
    score_max: float
    status: str


@dataclass
class TopKResult:
    entries: list
    exact: bool
    visited_users: int = 0
    elapsed_ms: float = 0.0


class _Entry:
    """Per-(tag, item) candidate bookkeeping.

    sf: accumulated social frequency over visited taggers.
    seen: number of visited taggers (each contributes to sf once).
    tf: exact term frequency once its list entry has been consumed.

    The count of possibly-unseen taggers is not stored: for a consumed
    entry it is tf - seen, otherwise current_head_tf - seen, which
    telescopes to the same value as explicit drop bookkeeping would.
    """

    __slots__ = ("sf", "seen", "tf")

    def __init__(self):
        self.sf = 0.0
        self.seen = 0
        self.tf = None


class Session:
    """All mutable search state for one seeker, reusable per keystroke."""

    def __init__(self, corpus, index, graph, seeker, config: EngineConfig):
        self.corpus = corpus
        self.index = index
        self.graph = graph
        self.seeker = seeker
        self.config = config
        self.view = IndexView(index)
        self.completed = []          # term strings, typed order, deduplicated
        self.completed_tags = []     # tag id per term; None when not in vocab
        self.completed_tag_set = set()
        self.prefix = ""
        self.span_node = None
        self.phase = 0               # bumps on every frontier reset
        self.buffers = {}            # tag id -> {item id -> _Entry}
        self.consumed = {}           # tag id -> set of item ids read from its list
        self.item_tags = {}          # item id -> set of tag ids with entries
        self.completions_seen = set()  # prefix completions met in p-spaces
        self.done_terms = {}         # user id -> completed terms processed
        self.prefix_done = {}        # user id -> phase of last prefix processing
        self.advanced = set()        # ranks with cursor position > 0
        self.frontier = None
        self.visited = 0
        self.terminated = False
        self.event_log = []
        self.last_elapsed_ms = 0.0
        self._popped = set()
        self._last_prox = None

    # -- frontier ---------------------------------------------------------

    def _reset_frontier(self):
        uid = self.corpus.users.get(self.seeker)
        if uid is None or self.graph is None or uid >= len(self.graph.adj):
            self.frontier = None
        else:
            agg = self.config.aggregator or MaxProduct()
            self.frontier = ProximityIterator(self.graph, uid, agg)
        self.visited = 0
        self.phase += 1
        self._popped = set()
        self._last_prox = None

    def max_proximity(self):
        """Upper bound on the proximity of any not-yet-visited user."""
        return self.frontier.bound() if self.frontier is not None else 0.0

    # -- query editing ----------------------------------------------------

    def append_char(self, c):
        if len(c) != 1 or c.isspace():
            raise ValueError("append_char takes a single non-space character")
        starting_term = not self.prefix
        self.prefix += c
        self.span_node = self.index.locate(self.prefix)
        if starting_term:
            # First character of a term: candidates for the new prefix may
            # live in already-visited p-spaces, so exploration restarts.
            self._reset_frontier()
        else:
            self._filter_to_prefix()
        self.terminated = False
        self.event_log.append(("char", c))

    def new_term(self):
        self.event_log.append(("new_term", None))
        if not self.prefix:
            return
        term = self.prefix
        if term not in self.completed:
            self.completed.append(term)
            tid = self.corpus.tags.get(term)
            self.completed_tags.append(tid)
            if tid is not None:
                self.completed_tag_set.add(tid)
        for tid in list(self.buffers):
            if tid not in self.completed_tag_set:
                self._drop_buffer(tid)
        # Lists of non-query tags become readable afresh for future terms.
        for rank in list(self.advanced):
            if self.index.tag_at_rank[rank] not in self.completed_tag_set:
                self.view.rewind_list(rank)
                self.advanced.discard(rank)
        self.completions_seen.clear()
        # Users that processed the prefix this phase already contributed to
        # the newly frozen term's buffer (its tag completes the prefix).
        m = len(self.completed)
        for uid, ph in self.prefix_done.items():
            if ph == self.phase:
                self.done_terms[uid] = m
        self.prefix = ""
        self.span_node = None
        self._reset_frontier()
        self.terminated = False

    def _drop_buffer(self, tid):
        for iid in self.buffers[tid]:
            tags = self.item_tags.get(iid)
            if tags is not None:
                tags.discard(tid)
                if not tags:
                    del self.item_tags[iid]
        del self.buffers[tid]
        self.consumed.pop(tid, None)
        self.completions_seen.discard(tid)

    def _filter_to_prefix(self):
        rank_of = self.index.rank_of_tag
        if self.span_node is None:
            lo = hi = -1
        else:
            lo, hi = self.span_node.lo, self.span_node.hi
        for tid in list(self.buffers):
            if tid in self.completed_tag_set:
                continue
            if not lo <= rank_of[tid] < hi:
                self._drop_buffer(tid)

    # -- exploration steps --------------------------------------------------

    def _touch(self, tid, iid, prox):
        entry = self.buffers.setdefault(tid, {}).get(iid)
        if entry is None:
            entry = self.buffers[tid][iid] = _Entry()
            self.item_tags.setdefault(iid, set()).add(tid)
        entry.sf += prox
        entry.seen += 1

    def process_p_space(self, user, prox):
        """Fold one visited user's taggings into the candidate buffers."""
        m = len(self.completed)
        done = self.done_terms.get(user, 0)
        pending = {t for t in self.completed_tags[done:m] if t is not None}
        do_prefix = bool(self.prefix) and self.span_node is not None \
            and self.prefix_done.get(user) != self.phase
        if pending or do_prefix:
            rank_of = self.index.rank_of_tag
            if do_prefix:
                lo, hi = self.span_node.lo, self.span_node.hi
            completed_set = self.completed_tag_set
            for iid, tid in self.corpus.p_space[user]:
                if tid in pending:
                    self._touch(tid, iid, prox)
                elif do_prefix and tid not in completed_set \
                        and lo <= rank_of[tid] < hi:
                    self._touch(tid, iid, prox)
                    self.completions_seen.add(tid)
        self.done_terms[user] = m
        if do_prefix:
            self.prefix_done[user] = self.phase

    def _social_step(self):
        user, prox = next(self.frontier)
        assert user not in self._popped, "frontier yielded a user twice"
        assert self._last_prox is None or prox <= self._last_prox, \
            "frontier proximity must be non-increasing"
        self._popped.add(user)
        self._last_prox = prox
        self.visited += 1
        self.process_p_space(user, prox)

    def _consume(self, tid, rank, iid, tf):
        entry = self.buffers.setdefault(tid, {}).get(iid)
        if entry is None:
            entry = self.buffers[tid][iid] = _Entry()
            self.item_tags.setdefault(iid, set()).add(tid)
        entry.tf = tf
        self.consumed.setdefault(tid, set()).add(iid)
        self.view.advance_list(rank)
        self.advanced.add(rank)

    def _textual_step(self):
        """One sorted access on every non-exhausted query term list."""
        rank_of = self.index.rank_of_tag
        tag_at = self.index.tag_at_rank
        for tid in self.completed_tags:
            if tid is None:
                continue
            rank = rank_of[tid]
            head = self.view.list_head(rank)
            if head is not None:
                self._consume(tid, rank, head[0], head[1])
        if self.span_node is not None:
            head = self.view.node_head(self.span_node)
            if head is not None:
                neg_tf, iid, rank = head
                self._consume(tag_at[rank], rank, iid, -neg_tf)

    def drain_candidate_heads(self):
        """Consume list heads for as long as they refer to known candidates."""
        rank_of = self.index.rank_of_tag
        tag_at = self.index.tag_at_rank
        item_tags = self.item_tags
        changed = True
        while changed:
            changed = False
            for tid in self.completed_tags:
                if tid is None:
                    continue
                rank = rank_of[tid]
                head = self.view.list_head(rank)
                while head is not None and head[0] in item_tags:
                    self._consume(tid, rank, head[0], head[1])
                    changed = True
                    head = self.view.list_head(rank)
            if self.span_node is not None:
                head = self.view.node_head(self.span_node)
                while head is not None and head[1] in item_tags:
                    neg_tf, iid, rank = head
                    self._consume(tag_at[rank], rank, iid, -neg_tf)
                    changed = True
                    head = self.view.node_head(self.span_node)

    # -- bounds -------------------------------------------------------------

    def _term_head_tf(self, tid):
        if tid is None:
            return 0
        head = self.view.list_head(self.index.rank_of_tag[tid])
        return head[1] if head is not None else 0

    def _virtual_head_tf(self):
        if self.span_node is None:
            return 0
        return self.view.node_max_score(self.span_node)

    def score_bounds(self, iid):
        """Sound [min, max] on the item's total score in the current state."""
        cfg = self.config
        a, ts, h = cfg.alpha, cfg.tf_scale, cfg.score_transform
        mp = self.max_proximity()
        lo = 0.0
        hi = 0.0
        for tid in self.completed_tags:
            head_tf = self._term_head_tf(tid)
            entry = self.buffers.get(tid, {}).get(iid) if tid is not None else None
            if entry is None:
                lo_t = 0.0
                hi_t = a * ts * head_tf + (1.0 - a) * (mp * head_tf)
            else:
                if entry.tf is not None:
                    tf_lo = tf_hi = entry.tf
                    unseen = entry.tf - entry.seen
                else:
                    tf_lo = entry.seen
                    tf_hi = head_tf
                    unseen = head_tf - entry.seen
                lo_t = a * ts * tf_lo + (1.0 - a) * entry.sf
                hi_t = a * ts * tf_hi + (1.0 - a) * (entry.sf + mp * unseen)
            lo += transform(h, lo_t)
            hi += transform(h, hi_t)
        if self.prefix:
            lo_r, hi_r = self._prefix_bounds(iid, a, ts, mp)
            lo += transform(h, lo_r)
            hi += transform(h, hi_r)
        return lo, hi

    def _prefix_bounds(self, iid, a, ts, mp):
        # tf and sf maximize independently over the prefix's completions;
        # tags never met for this item are covered by the virtual head.
        vh = self._virtual_head_tf()
        node = self.span_node
        if node is None:
            return 0.0, 0.0
        lo_rank, hi_rank = node.lo, node.hi
        rank_of = self.index.rank_of_tag
        sf_lo = 0.0
        tf_lo = 0
        sf_hi = mp * vh
        tf_hi = vh
        for tid in self.item_tags.get(iid, ()):
            if not lo_rank <= rank_of[tid] < hi_rank:
                continue
            entry = self.buffers[tid][iid]
            if entry.sf > sf_lo:
                sf_lo = entry.sf
            if entry.tf is not None:
                if entry.tf > tf_lo:
                    tf_lo = entry.tf
                if entry.tf > tf_hi:
                    tf_hi = entry.tf
                unseen = entry.tf - entry.seen
            else:
                if entry.seen > tf_lo:
                    tf_lo = entry.seen
                unseen = vh - entry.seen
            cap = entry.sf + mp * unseen
            if cap > sf_hi:
                sf_hi = cap
        lo = a * ts * tf_lo + (1.0 - a) * sf_lo
        hi = a * ts * tf_hi + (1.0 - a) * sf_hi
        return lo, hi

    def wildcard_bound(self):
        """Upper bound on the score of any item never seen so far."""
        cfg = self.config
        a, ts, h = cfg.alpha, cfg.tf_scale, cfg.score_transform
        mp = self.max_proximity()
        total = 0.0
        for tid in self.completed_tags:
            head_tf = self._term_head_tf(tid)
            total += transform(h, a * ts * head_tf + (1.0 - a) * (mp * head_tf))
        if self.prefix:
            vh = self._virtual_head_tf()
            total += transform(h, a * ts * vh + (1.0 - a) * (mp * vh))
        return total

    def candidate_bounds(self):
        """item name -> (min, max) for every current candidate."""
        names = self.corpus.items.names
        return {names[iid]: self.score_bounds(iid) for iid in self.item_tags}

    # -- termination ----------------------------------------------------------

    def termination_met(self):
        """True iff the current top-k is provably the exact answer.

        Requires the wildcard to be strictly below the k-th lower bound
        (an unseen item's id is unknown, so a tie could displace), every
        top-k range to be closed, and every other candidate to be unable
        to reach the k-th place even on a tie.
        """
        k = self.config.k
        ubw = self.wildcard_bound()
        rows = []
        for iid in self.item_tags:
            lo, hi = self.score_bounds(iid)
            rows.append((lo, hi, iid))
        positives = [r for r in rows if r[0] > 0.0]
        if len(positives) < k:
            if ubw != 0.0:
                return False
            return all(lo == hi for lo, hi, _ in rows)
        positives.sort(key=lambda r: (-r[0], r[2]))
        kth_lo, _, kth_id = positives[k - 1]
        if not ubw < kth_lo:
            return False
        top_ids = set()
        for lo, hi, iid in positives[:k]:
            if lo != hi:
                return False
            top_ids.add(iid)
        for lo, hi, iid in rows:
            if iid in top_ids:
                continue
            if hi > kth_lo or (hi == kth_lo and iid < kth_id):
                return False
        return True

    # -- anytime extraction -----------------------------------------------------

    def anytime_topk(self):
        """Best ranked answer extractable from the current bounds."""
        k = self.config.k
        ubw = self.wildcard_bound()
        rows = []
        for iid in self.item_tags:
            lo, hi = self.score_bounds(iid)
            if hi > 0.0:
                rows.append((iid, lo, hi))
        his = sorted(h for _, _, h in rows)
        ids_by_hi = {}
        for iid, _, hi in rows:
            ids_by_hi.setdefault(hi, []).append(iid)
        for ids in ids_by_hi.values():
            ids.sort()
        n = len(rows)

        def blockers(iid, lo, hi):
            if ubw >= lo:
                return k  # an unseen item could tie and win on id
            count = n - bisect.bisect_right(his, lo)
            if hi > lo:
                count -= 1  # self
            tied = ids_by_hi.get(lo)
            if tied is not None:
                count += bisect.bisect_left(tied, iid)
            return count

        # Only the k best by (lower bound, id) can be guaranteed: anything
        # below them already has k blockers.
        by_lo = heapq.nsmallest(k, rows, key=lambda r: (-r[1], r[0]))
        guaranteed = {
            iid for iid, lo, hi in by_lo if blockers(iid, lo, hi) < k
        }
        mid_key = lambda r: (-(r[1] + r[2]) / 2.0, -r[1], r[0])
        chosen = sorted((r for r in rows if r[0] in guaranteed), key=mid_key)
        rest = [r for r in rows if r[0] not in guaranteed]
        chosen += heapq.nsmallest(k - len(chosen), rest, key=mid_key)
        names = self.corpus.items.names
        entries = [
            ResultEntry(
                item=names[iid],
                score_min=lo,
                score_max=hi,
                status=GUARANTEED if iid in guaranteed else POSSIBLE,
            )
            for iid, lo, hi in chosen
        ]
        return TopKResult(
            entries=entries,
            exact=self.terminated,
            visited_users=self.visited,
            elapsed_ms=self.last_elapsed_ms,
        )

    # -- main loop -------------------------------------------------------------

    def _social_available(self):
        if self.frontier is None or not self.frontier.heap:
            return False
        cap = self.config.max_visited_users
        return cap is None or self.visited < cap

    def _textual_available(self):
        if self.config.alpha <= 0.0:
            return False
        for tid in self.completed_tags:
            if self._term_head_tf(tid) > 0:
                return True
        return self._virtual_head_tf() > 0

    def _choose_branch(self):
        # Compare the best score either branch could still contribute; the
        # term-head sum is a common factor, so the blend weights decide.
        a, ts = self.config.alpha, self.config.tf_scale
        social = (1.0 - a) * self.max_proximity()
        textual = a * ts
        return SOCIAL if social >= textual else TEXTUAL

    def run(self, budget_ms=None, observer=None):
        """Explore until exact, out of work, or out of budget."""
        start = time.perf_counter()
        iters = 0
        terminated = False
        while True:
            social_ok = self._social_available()
            textual_ok = self._textual_available()
            if not social_ok and not textual_ok:
                terminated = self.termination_met()
                break
            if social_ok and textual_ok:
                branch = self._choose_branch()
            else:
                branch = SOCIAL if social_ok else TEXTUAL
            if branch == SOCIAL:
                self._social_step()
            else:
                self._textual_step()
            self.drain_candidate_heads()
            iters += 1
            if observer is not None:
                observer(self)
            n = len(self.item_tags)
            interval = 1 if n <= 64 else (16 if n <= 4096 else 128)
            if iters % interval == 0 or observer is not None:
                if self.termination_met():
                    terminated = True
                    break
            if budget_ms is not None and iters % 16 == 0:
                if (time.perf_counter() - start) * 1000.0 >= budget_ms:
                    break
        if not terminated and not self._social_available() \
                and not self._textual_available():
            terminated = self.termination_met()
        self.terminated = terminated
        self.last_elapsed_ms = (time.perf_counter() - start) * 1000.0
        return self.anytime_topk()

    def keystroke(self, event, value=None, observer=None):
        """Apply one typing event and return the refreshed result."""
        if event == "char":
            self.append_char(value)
        elif event == "new_term":
            self.new_term()
        else:
            raise ValueError(f"unknown keystroke event: {event}")
        return self.run(budget_ms=self.config.time_budget_ms, observer=observer)


def _dedupe(terms):
    out = []
    for t in terms:
        if t not in out:
            out.append(t)
    return out


def execute(corpus, index, graph, seeker, query: Query, config: EngineConfig,
            observer=None, budget_ms="config"):
    """One-shot query evaluation (a session initialized in a single step)."""
    if budget_ms == "config":
        budget_ms = config.time_budget_ms
    session = Session(corpus, index, graph, seeker, config)
    for term in _dedupe(query.completed_terms):
        session.completed.append(term)
        tid = corpus.tags.get(term)
        session.completed_tags.append(tid)
        if tid is not None:
            session.completed_tag_set.add(tid)
    session.prefix = query.active_prefix or ""
    if session.prefix:
        session.span_node = index.locate(session.prefix)
    session._reset_frontier()
    return session.run(budget_ms=budget_ms, observer=observer)
