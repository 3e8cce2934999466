"""Ranked prefix completion over per-tag inverted lists.

A Patricia-style trie over the lexicographically sorted tag vocabulary
maps any prefix to the contiguous rank span of its completions.  Each
tag owns an inverted list of (item, tf) entries sorted by tf descending
(ties by ascending item id).  Every trie node carries the best current
head entry among its descendant lists, so the best completion entry for
any prefix is available in O(1) and stays correct as cursors advance:
node entries are refreshed eagerly along the leaf-to-root path on every
advance, stopping early once an ancestor is unaffected.

The trie skeleton and the lists are immutable and shared; cursor
positions and node head entries live in a per-session IndexView overlay,
so concurrent sessions never observe each other's consumption.
"""

from __future__ import annotations


class TrieNode:
    __slots__ = ("node_id", "label", "children", "tag_rank", "lo", "hi")

    def __init__(self, node_id, label, lo, hi):
        self.node_id = node_id
        self.label = label
        self.children = {}
        self.tag_rank = None
        self.lo = lo
        self.hi = hi


class CompletionIndex:
    """Immutable completion trie plus tf-ordered inverted lists."""

    def __init__(self, corpus):
        vocab = sorted(corpus.tags.names)
        self.vocab = vocab
        self.rank_of_name = {t: r for r, t in enumerate(vocab)}
        self.rank_of_tag = [0] * len(vocab)
        self.tag_at_rank = [0] * len(vocab)
        for name, rank in self.rank_of_name.items():
            tid = corpus.tags.get(name)
            self.rank_of_tag[tid] = rank
            self.tag_at_rank[rank] = tid
        self.lists = []
        for rank in range(len(vocab)):
            tid = self.tag_at_rank[rank]
            entries = sorted(corpus.tf_by_tag[tid].items(), key=lambda e: (-e[1], e[0]))
            self.lists.append(entries)
        self.nodes = []
        self.root = self._build(0, len(vocab), 0) if vocab else None
        self.leaf_path = [()] * len(vocab)
        if self.root is not None:
            self._record_paths(self.root, [])
        self.base_heads = self._compute_heads()

    def _build(self, lo, hi, depth):
        # All words in [lo, hi) share words[lo][:depth]; extend the edge
        # label to the longest common prefix of the range (first vs last
        # suffices on a sorted range), which is what keeps the trie
        # Patricia-compressed.
        words = self.vocab
        first, last = words[lo], words[hi - 1]
        start = depth
        limit = min(len(first), len(last))
        while depth < limit and first[depth] == last[depth]:
            depth += 1
        node = TrieNode(len(self.nodes), first[start:depth], lo, hi)
        self.nodes.append(node)
        i = lo
        if len(first) == depth:
            node.tag_rank = lo
            i += 1
        while i < hi:
            c = words[i][depth]
            j = i + 1
            while j < hi and words[j][depth] == c:
                j += 1
            node.children[c] = self._build(i, j, depth + 1)
            i = j
        return node

    def _record_paths(self, node, path):
        path.append(node.node_id)
        if node.tag_rank is not None:
            self.leaf_path[node.tag_rank] = tuple(path)
        for child in node.children.values():
            self._record_paths(child, path)
        path.pop()

    def _compute_heads(self):
        heads = [None] * len(self.nodes)

        def visit(node):
            best = None
            if node.tag_rank is not None and self.lists[node.tag_rank]:
                item, tf = self.lists[node.tag_rank][0]
                best = (-tf, item, node.tag_rank)
            for child in node.children.values():
                visit(child)
                ch = heads[child.node_id]
                if ch is not None and (best is None or ch < best):
                    best = ch
            heads[node.node_id] = best

        if self.root is not None:
            visit(self.root)
        return heads

    def locate(self, prefix):
        """Trie node whose span is exactly the completions of prefix."""
        node = self.root
        if node is None:
            return None
        depth = 0
        while True:
            label = node.label
            take = min(len(label), len(prefix) - depth)
            if prefix[depth:depth + take] != label[:take]:
                return None
            depth += take
            if depth == len(prefix):
                return node
            child = node.children.get(prefix[depth])
            if child is None:
                return None
            depth += 1  # the branching character itself
            node = child

    def span(self, prefix):
        """Rank interval [lo, hi) of tags completing prefix, or None."""
        node = self.locate(prefix)
        return (node.lo, node.hi) if node is not None else None


class IndexView:
    """Per-session cursor overlay over a shared CompletionIndex.

    Holds the list cursor positions and the derived per-node best head
    entries.  Head entries are (-tf, item, rank) tuples so that tuple
    order realizes the global tie-break: tf descending, then item id
    ascending, then tag lexicographic (rank order is lexicographic).
    """

    def __init__(self, index: CompletionIndex):
        self.index = index
        self.pos = [0] * len(index.vocab)
        self.heads = list(index.base_heads)

    def list_head(self, rank):
        lst = self.index.lists[rank]
        p = self.pos[rank]
        return lst[p] if p < len(lst) else None

    def _leaf_entry(self, rank):
        lst = self.index.lists[rank]
        p = self.pos[rank]
        if p >= len(lst):
            return None
        item, tf = lst[p]
        return (-tf, item, rank)

    def advance_list(self, rank):
        """Consume one tag list head; returns the consumed (item, tf)."""
        head = self.list_head(rank)
        if head is None:
            return None
        self.pos[rank] += 1
        self._refresh(rank)
        return head

    def rewind_list(self, rank):
        if self.pos[rank]:
            self.pos[rank] = 0
            self._refresh(rank)

    def _refresh(self, rank):
        # Recompute best entries bottom-up along this leaf's root path;
        # stop as soon as a node's entry is unchanged.
        idx = self.index
        heads = self.heads
        for node_id in reversed(idx.leaf_path[rank]):
            node = idx.nodes[node_id]
            best = self._leaf_entry(node.tag_rank) if node.tag_rank is not None else None
            for child in node.children.values():
                ch = heads[child.node_id]
                if ch is not None and (best is None or ch < best):
                    best = ch
            if heads[node_id] == best:
                break
            heads[node_id] = best

    def node_head(self, node):
        return self.heads[node.node_id]

    def node_max_score(self, node):
        head = self.heads[node.node_id]
        return -head[0] if head is not None else 0

    def top_tf(self, term):
        """Current head tf: concrete list for a full tag, else virtual."""
        rank = self.index.rank_of_name.get(term)
        if rank is not None:
            head = self.list_head(rank)
            return head[1] if head is not None else 0
        node = self.index.locate(term)
        return self.node_max_score(node) if node is not None else 0


class PrefixCursor:
    """Ranked, per-item-deduplicated stream over all completions of a prefix.

    advance() emits (item, tag, tf) in non-increasing tf order, at most
    once per item (the item's best completion entry).  The raw variants
    skip deduplication and expose the underlying merged stream; they are
    what the search engine consumes.  Cursors read through their view's
    shared positions, so entries consumed elsewhere are not re-emitted.
    """

    def __init__(self, view: IndexView, prefix, node):
        self.view = view
        self.prefix = prefix
        self.node = node
        self.emitted = set()

    def peek_raw(self):
        return self.view.node_head(self.node)

    def advance_raw(self):
        head = self.view.node_head(self.node)
        if head is None:
            return None
        self.view.advance_list(head[2])
        return head

    def peek(self):
        while True:
            head = self.view.node_head(self.node)
            if head is None:
                return None
            if head[1] in self.emitted:
                self.view.advance_list(head[2])
                continue
            return self._entry(head)

    def advance(self):
        while True:
            head = self.advance_raw()
            if head is None:
                return None
            if head[1] not in self.emitted:
                self.emitted.add(head[1])
                return self._entry(head)

    def _entry(self, head):
        neg_tf, item, rank = head
        return (item, self.view.index.vocab[rank], -neg_tf)


def build_index(corpus) -> CompletionIndex:
    return CompletionIndex(corpus)


def open_cursor(index_or_view, prefix):
    """Cursor over the completions of prefix; None when nothing matches."""
    if isinstance(index_or_view, IndexView):
        view = index_or_view
    else:
        view = IndexView(index_or_view)
    node = view.index.locate(prefix)
    if node is None:
        return None
    return PrefixCursor(view, prefix, node)


def top_tf(index_or_view, term):
    if isinstance(index_or_view, IndexView):
        return index_or_view.top_tf(term)
    return IndexView(index_or_view).top_tf(term)
