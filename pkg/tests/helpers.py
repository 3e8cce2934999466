"""Independent oracles used across the test modules.

Everything here recomputes expected values by brute force, sharing no
code paths with the implementations under test.
"""

from tagsearch.graph import MaxProduct


def simple_path_proximity(graph, seeker, aggregator=None):
    """Best aggregate over all simple paths, by exhaustive enumeration.

    Only usable on small graphs (exponential).  Returns {user: value}
    for every user reachable from the seeker, seeker excluded.
    """
    agg = aggregator or MaxProduct()
    best = {}
    n = len(graph.adj)
    visited = [False] * n
    visited[seeker] = True

    def walk(u, value):
        for v, w in graph.adj[u]:
            if visited[v]:
                continue
            nxt = agg.seed(w) if u == seeker else agg.extend(value, w)
            if nxt > best.get(v, 0.0):
                best[v] = nxt
            visited[v] = True
            walk(v, nxt)
            visited[v] = False

    walk(seeker, None)
    return best


def drain_proximity(graph, seeker, aggregator=None):
    from tagsearch.graph import ProximityIterator

    return list(ProximityIterator(graph, seeker, aggregator or MaxProduct()))


def virtual_list_oracle(corpus, prefix):
    """Sort-merge-dedup of all inverted lists under a prefix.

    Returns [(item id, tag string, tf)] in the order a full cursor
    drain must produce: tf descending, then item id ascending; each
    item once, represented by its best (tf, then lexicographic tag)
    entry.
    """
    per_item = {}
    for rank, tag in enumerate(sorted(corpus.vocabulary())):
        if not tag.startswith(prefix):
            continue
        tid = corpus.tags.get(tag)
        for iid, tf in corpus.tf_by_tag[tid].items():
            key = (-tf, rank)
            if iid not in per_item or key < per_item[iid][0]:
                per_item[iid] = (key, tag, tf)
    rows = [(iid, tag, tf) for iid, ((ntf, _), tag, tf) in per_item.items()]
    rows.sort(key=lambda r: (-r[2], r[0]))
    return rows


def node_head_oracle(view, node):
    """Recompute a node's best head entry ignoring the cached values."""
    best = None
    if node.tag_rank is not None:
        rows = view.index.lists[node.tag_rank]
        pos = view.pos[node.tag_rank]
        if pos < len(rows):
            iid, tf = rows[pos]
            best = (-tf, iid, node.tag_rank)
    for child in node.children.values():
        sub = node_head_oracle(view, child)
        if sub is not None and (best is None or sub < best):
            best = sub
    return best


def assert_heap_property(view):
    index = view.index
    stack = [index.root]
    while stack:
        node = stack.pop()
        assert view.node_head(node) == node_head_oracle(view, node), \
            f"stale head at node {node.node_id}"
        stack.extend(node.children.values())
