"""Tagging-triple corpus: ingestion, cleaning, expansion and lookups.

The corpus is an ordered set of unique (user, item, tag) triples plus the
derived structures the rest of the package needs: per-user tagging sequences
(p-spaces), per-tag term frequencies, and dense integer ids for users, items
and tags.  Instances are treated as immutable once built; every transform
returns a new corpus.
"""

from __future__ import annotations

import logging
from typing import Iterable, Iterator, NamedTuple

logger = logging.getLogger(__name__)


class Triple(NamedTuple):
    user: str
    item: str
    tag: str


class Interner:
    """Bidirectional string to dense-int mapping, ids in first-seen order."""

    __slots__ = ("_ids", "names")

    def __init__(self):
        self._ids = {}
        self.names = []

    def intern(self, name):
        idx = self._ids.get(name)
        if idx is None:
            idx = len(self.names)
            self._ids[name] = idx
            self.names.append(name)
        return idx

    def get(self, name):
        return self._ids.get(name)

    def name(self, idx):
        return self.names[idx]

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._ids


def _normalize_tag(raw):
    """Lowercase and strip a tag; return None when unusable."""
    tag = raw.strip().lower()
    if not tag or len(tag.split()) != 1:
        return None
    return tag


class Corpus:
    """Immutable collection of unique tagging triples and derived lookups.

    Attributes
    ----------
    users, items, tags : Interner
        Dense id maps, ids assigned in order of first appearance.
    p_space : list of per-user lists of (item_id, tag_id), insertion order.
    tf_by_tag : list of per-tag dicts item_id -> distinct tagger count.
    """

    def __init__(self, rows, cooccurrence=None, diagnostics=None):
        self.users = Interner()
        self.items = Interner()
        self.tags = Interner()
        self.p_space = []
        self.tf_by_tag = []
        self._triples = []
        self._seen = set()
        self.cooccurrence = cooccurrence
        self.diagnostics = list(diagnostics or [])
        for user, item, tag in rows:
            self._add(user, item, tag)

    def _add(self, user, item, tag):
        uid = self.users.intern(user)
        iid = self.items.intern(item)
        tid = self.tags.intern(tag)
        while len(self.p_space) < len(self.users):
            self.p_space.append([])
        while len(self.tf_by_tag) < len(self.tags):
            self.tf_by_tag.append({})
        key = (uid, iid, tid)
        if key in self._seen:
            return
        self._seen.add(key)
        self._triples.append(key)
        self.p_space[uid].append((iid, tid))
        bucket = self.tf_by_tag[tid]
        bucket[iid] = bucket.get(iid, 0) + 1

    # -- lookups ---------------------------------------------------------

    def __len__(self):
        return len(self._triples)

    def iter_triples(self) -> Iterator[Triple]:
        """Unique triples as strings, in insertion order."""
        un, inm, tn = self.users.names, self.items.names, self.tags.names
        for uid, iid, tid in self._triples:
            yield Triple(un[uid], inm[iid], tn[tid])

    def has_triple(self, user, item, tag):
        uid = self.users.get(user)
        iid = self.items.get(item)
        tid = self.tags.get(tag)
        if uid is None or iid is None or tid is None:
            return False
        return (uid, iid, tid) in self._seen

    def tf(self, tag, item):
        """Distinct users having tagged item with tag."""
        tid = self.tags.get(tag)
        iid = self.items.get(item)
        if tid is None or iid is None:
            return 0
        return self.tf_by_tag[tid].get(iid, 0)

    def tf_id(self, tag_id, item_id):
        return self.tf_by_tag[tag_id].get(item_id, 0)

    def user_p_space(self, user):
        """(item, tag) string pairs for a user, insertion order."""
        uid = self.users.get(user)
        if uid is None:
            return []
        inm, tn = self.items.names, self.tags.names
        return [(inm[i], tn[t]) for i, t in self.p_space[uid]]

    def vocabulary(self):
        return list(self.tags.names)

    def items_with_tag(self, tag):
        tid = self.tags.get(tag)
        if tid is None:
            return set()
        return set(self.tf_by_tag[tid].keys())

    def distinct_users_per_item(self):
        """item_id -> count of distinct users having tagged it."""
        taggers = {}
        for uid, pairs in enumerate(self.p_space):
            for iid, _ in pairs:
                taggers.setdefault(iid, set()).add(uid)
        return {iid: len(s) for iid, s in taggers.items()}

    def distinct_items_per_user(self):
        """user_id -> count of distinct items tagged."""
        return {
            uid: len({iid for iid, _ in pairs})
            for uid, pairs in enumerate(self.p_space)
        }

    def ensure_user(self, name):
        """Intern a user that may have no triples (e.g. edge-file only)."""
        uid = self.users.intern(name)
        while len(self.p_space) < len(self.users):
            self.p_space.append([])
        return uid

    def _rebuild(self, keep):
        """New corpus with a subset of triples, interners shared.

        Keeping the interner objects (they are append-only) preserves the
        dense ids, so graphs built against this corpus stay valid for the
        derived one.  `keep` filters id-triples.
        """
        c = Corpus.__new__(Corpus)
        c.users, c.items, c.tags = self.users, self.items, self.tags
        c.p_space = [[] for _ in range(len(self.users))]
        c.tf_by_tag = [{} for _ in range(len(self.tags))]
        c._triples = []
        c._seen = set()
        c.cooccurrence = self.cooccurrence
        c.diagnostics = []
        for key in self._triples:
            if not keep(key):
                continue
            uid, iid, tid = key
            c._seen.add(key)
            c._triples.append(key)
            c.p_space[uid].append((iid, tid))
            bucket = c.tf_by_tag[tid]
            bucket[iid] = bucket.get(iid, 0) + 1
        return c

    def remove_triple(self, user, item, tag):
        """New corpus without one triple (used by leave-one-out trials)."""
        uid = self.users.get(user)
        iid = self.items.get(item)
        tid = self.tags.get(tag)
        target = (uid, iid, tid)
        return self._rebuild(lambda key: key != target)

    def restrict_items(self, keep_items):
        """New corpus keeping only triples whose item is in keep_items."""
        ids = {self.items.get(i) for i in keep_items}
        return self._rebuild(lambda key: key[1] in ids)


def _parse_lines(lines, n_fields, what):
    rows = []
    diagnostics = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != n_fields:
            diagnostics.append(f"line {lineno}: expected {n_fields} fields, got {len(parts)}")
            continue
        rows.append((lineno, parts))
    if diagnostics:
        logger.warning("%s: skipped %d malformed lines", what, len(diagnostics))
    return rows, diagnostics


def ingest_triples(source, cooccurrence=None) -> Corpus:
    """Build a corpus from a TSV source of user<TAB>item<TAB>tag lines.

    `source` is a path or an iterable of lines.  Lines starting with '#'
    and blank lines are ignored.  Malformed lines are skipped with a
    per-line diagnostic kept on the returned corpus.
    """
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return ingest_triples(list(fh), cooccurrence=cooccurrence)
    parsed, diagnostics = _parse_lines(source, 3, "triples")
    rows = []
    for lineno, (user, item, tag) in parsed:
        user = user.strip()
        item = item.strip()
        norm = _normalize_tag(tag)
        if not user or not item or norm is None:
            diagnostics.append(f"line {lineno}: empty or invalid field")
            continue
        rows.append((user, item, norm))
    return Corpus(rows, cooccurrence=cooccurrence, diagnostics=diagnostics)


def load_cooccurrence(source):
    """Read a tag<TAB>keyword<TAB>count table into tag -> [(keyword, count)]."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return load_cooccurrence(list(fh))
    parsed, _ = _parse_lines(source, 3, "cooccurrence")
    table = {}
    for lineno, (tag, keyword, count) in parsed:
        tag = _normalize_tag(tag)
        keyword = _normalize_tag(keyword)
        try:
            n = int(count)
        except ValueError:
            continue
        if tag is None or keyword is None or n <= 0:
            continue
        table.setdefault(tag, []).append((keyword, n))
    return table


def expand_tags(corpus, max_keywords=5) -> Corpus:
    """Add, per triple, the most co-occurrent keywords of its tag.

    For each (u, i, t) the up-to `max_keywords` keywords most associated
    with t in the corpus cooccurrence table are added as (u, i, w) triples.
    Ties are broken by descending count then lexicographic keyword.  With no
    table attached this is the identity.
    """
    table = corpus.cooccurrence
    if not table:
        return corpus
    tops = {
        tag: [w for w, _ in sorted(pairs, key=lambda kv: (-kv[1], kv[0]))[:max_keywords]]
        for tag, pairs in table.items()
    }
    rows = list(corpus.iter_triples())
    extra = []
    for user, item, tag in rows:
        for word in tops.get(tag, ()):
            extra.append((user, item, word))
    return Corpus(rows + extra, cooccurrence=table)


def filter_corpus(corpus, min_users_per_item=2, min_items_per_user=2) -> Corpus:
    """Drop unpopular items and inactive users until a fixed point.

    Items kept need at least `min_users_per_item` distinct taggers, users
    kept need at least `min_items_per_user` distinct tagged items.  Removing
    one side can invalidate the other, so the pass iterates to a fixed point.
    """
    rows = list(corpus.iter_triples())
    while True:
        item_users = {}
        user_items = {}
        for user, item, _ in rows:
            item_users.setdefault(item, set()).add(user)
            user_items.setdefault(user, set()).add(item)
        bad_items = {i for i, s in item_users.items() if len(s) < min_users_per_item}
        bad_users = {u for u, s in user_items.items() if len(s) < min_items_per_user}
        if not bad_items and not bad_users:
            break
        rows = [
            (u, i, t)
            for u, i, t in rows
            if i not in bad_items and u not in bad_users
        ]
    return Corpus(rows, cooccurrence=corpus.cooccurrence)


def write_triples(path, triples: Iterable[tuple]):
    """Write triples as the TSV format `ingest_triples` reads."""
    with open(path, "w", encoding="utf-8") as fh:
        for user, item, tag in triples:
            fh.write(f"{user}\t{item}\t{tag}\n")
