"""Elementary collapses, collapsibility search, and graph capping.

An elementary collapse removes a free edge together with the unique 2-cell
using it, or a free vertex together with its edge.  The vertex collapse is
only legal when the edge is used by no attaching word (otherwise removing it
would not leave a complex); with exactly one edge end at the vertex that is
equivalent to no attaching word turning there.
"""

from __future__ import annotations

from .complexes import (
    TwoComplex,
    Subcomplex,
    edge_multiplicities,
    euler_characteristic,
    is_connected,
    link,
    materialize,
    vertex_end_counts,
)
from .errors import InternalInvariantError, PreconditionError

# A collapse step is recorded as the flat pair of removed cells:
# ("cell", c), ("edge", e) for an edge collapse;
# ("edge", e), ("vertex", v) for a vertex collapse.
Step = tuple[str, str]


def _without_edge_cell(K: TwoComplex, e: str, c: str) -> TwoComplex:
    return TwoComplex(
        vertices=K.vertices,
        edges=tuple(t for t in K.edges if t[0] != e),
        cells=tuple(t for t in K.cells if t[0] != c),
    )


def _without_vertex_edge(K: TwoComplex, v: str, e: str) -> TwoComplex:
    return TwoComplex(
        vertices=tuple(x for x in K.vertices if x != v),
        edges=tuple(t for t in K.edges if t[0] != e),
        cells=K.cells,
    )


def _legal_moves(K: TwoComplex) -> list[tuple[str, ...]]:
    """All legal elementary collapses, deterministically ordered.

    Edge collapses ("edge", e, c) come before vertex collapses
    ("vertex", v, e).
    """
    moves = []
    mult = edge_multiplicities(K)
    for (c, word) in sorted(K.cells):
        for (e, _) in set(word):
            if mult[e] == 1:
                moves.append(("edge", e, c))
    deg = vertex_end_counts(K)
    for (e, src, dst) in sorted(K.edges):
        if mult[e] != 0:
            continue
        for v in {src, dst}:
            if deg[v] == 1:
                moves.append(("vertex", v, e))
    moves.sort()
    return moves


def _apply(K: TwoComplex, move: tuple[str, ...]) -> tuple[TwoComplex, list[Step]]:
    if move[0] == "edge":
        _, e, c = move
        return _without_edge_cell(K, e, c), [("cell", c), ("edge", e)]
    _, v, e = move
    return _without_vertex_edge(K, v, e), [("edge", e), ("vertex", v)]


def collapse(K: TwoComplex) -> TwoComplex:
    """Greedily perform elementary collapses until none remain."""
    return collapse_with_sequence(K)[0]


def collapse_with_sequence(K: TwoComplex) -> tuple[TwoComplex, tuple[Step, ...]]:
    steps: list[Step] = []
    while True:
        moves = _legal_moves(K)
        if not moves:
            return K, tuple(steps)
        K, removed = _apply(K, moves[0])
        steps.extend(removed)


def _is_point(K: TwoComplex) -> bool:
    return len(K.vertices) == 1 and not K.edges and not K.cells


def is_collapsible(K: TwoComplex, max_states: int = 200_000):
    """Whether SOME collapse sequence reduces K to a single vertex.

    Greedy collapsing of 2-complexes is order-sensitive, so after a greedy
    fast path this backtracks over free-face choices, memoizing visited
    complexes.  Returns (True, witness sequence) or (False, None).
    """
    if not K.vertices:
        return False, None
    # chi is invariant under elementary collapses; a point has chi 1.
    if euler_characteristic(K) != 1 or not is_connected(K):
        return False, None
    greedy, steps = collapse_with_sequence(K)
    if _is_point(greedy):
        return True, steps

    dead: set[TwoComplex] = set()
    budget = [max_states]

    def search(state: TwoComplex, acc: list[Step]):
        if _is_point(state):
            return True
        if state in dead:
            return False
        if budget[0] <= 0:
            raise PreconditionError("is_collapsible state budget exhausted")
        budget[0] -= 1
        for move in _legal_moves(state):
            nxt, removed = _apply(state, move)
            acc.extend(removed)
            if search(nxt, acc):
                return True
            del acc[-len(removed):]
        dead.add(state)
        return False

    acc: list[Step] = []
    if search(K, acc):
        return True, tuple(acc)
    return False, None


def _tree_path(K: TwoComplex, tree: dict[str, tuple[str, tuple[str, int]]],
               root: str, a: str, b: str) -> list[tuple[str, int]]:
    """Path a -> b through the spanning tree given by parent pointers.

    ``tree[w] = (parent, traversal w -> parent)``.
    """

    def to_root(v):
        out = []
        while v != root:
            pv, trav = tree[v]
            out.append((v, trav))  # trav already runs v -> parent
            v = pv
        return out

    up_a = to_root(a)
    up_b = to_root(b)
    while up_a and up_b and up_a[-1] == up_b[-1]:
        up_a.pop()
        up_b.pop()
    path = [t for (_, t) in up_a]  # a -> lca
    path += [(t[0], -t[1]) for (_, t) in reversed(up_b)]  # lca -> b
    return path


def cap_graph(graph: TwoComplex) -> TwoComplex:
    """Attach 2-cells to a connected non-tree graph so the result is
    collapsible, every edge lies in a cell boundary and every link is
    connected.

    Follows the inductive construction: fix a maximal tree T, peel off the
    non-tree edges e_1 < e_2 < ... one at a time and attach, for each e_i, a
    cell along e_i * g_i where g_i runs from the end of e_i back to its
    start covering every edge of T and every earlier non-tree edge.  (The
    earlier-edge coverage keeps links connected when T is small; each e_i
    still occurs exactly once overall, so the cells collapse in reverse
    order.)  All three conclusions are re-verified before returning.
    """
    if graph.cells:
        raise PreconditionError("cap_graph expects a 1-complex (no 2-cells)")
    if not graph.vertices or not is_connected(graph):
        raise PreconditionError("cap_graph expects a nonempty connected graph")
    if len(graph.edges) < len(graph.vertices):
        raise PreconditionError("cap_graph expects a graph with a cycle (not a tree)")

    root = min(graph.vertices)
    tree: dict[str, tuple[str, tuple[str, int]]] = {}
    seen = {root}
    adj: dict[str, list[tuple[str, tuple[str, int]]]] = {v: [] for v in graph.vertices}
    for (e, src, dst) in graph.edges:
        adj[src].append((dst, (e, 1)))
        adj[dst].append((src, (e, -1)))
    for v in adj:
        adj[v].sort()
    stack = [root]
    tree_edges: list[str] = []
    while stack:
        v = stack.pop()
        for (w, trav) in adj[v]:
            if w not in seen:
                seen.add(w)
                tree[w] = (v, (trav[0], -trav[1]))  # traversal w -> v
                tree_edges.append(trav[0])
                stack.append(w)
    non_tree = sorted(e for (e, _, _) in graph.edges if e not in set(tree_edges))

    def walk_covering(start: str, stop: str, cover: list[str]) -> list[tuple[str, int]]:
        """Deterministic walk start -> stop traversing every edge in cover."""
        word: list[tuple[str, int]] = []
        at = start
        for e in sorted(cover):
            src, dst = graph.edge_ends_raw(e)
            word += _tree_path(graph, tree, root, at, src)
            word.append((e, 1))
            at = dst
        word += _tree_path(graph, tree, root, at, stop)
        return word

    cells = []
    for i, e in enumerate(non_tree):
        src, dst = graph.edge_ends_raw(e)
        cover = sorted(tree_edges) + non_tree[:i]
        gamma = walk_covering(dst, src, cover)
        cells.append((f"cap_{e}", tuple([(e, 1)] + gamma)))

    capped = TwoComplex(vertices=graph.vertices, edges=graph.edges, cells=tuple(cells))

    ok, _ = is_collapsible(capped)
    if not ok:
        raise InternalInvariantError("cap_graph output is not collapsible")
    mult = edge_multiplicities(capped)
    if any(mult[e] == 0 for e in capped.edge_ids):
        raise InternalInvariantError("cap_graph output has an edge outside all cells")
    for v in capped.vertices:
        if not _link_connected(capped, v):
            raise InternalInvariantError(f"cap_graph output has disconnected link at {v!r}")
    return capped


def _link_connected(K: TwoComplex, v: str) -> bool:
    lk = link(K, v)
    if not lk.nodes:
        return True
    parent = {n: n for n in lk.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (_, a, b) in lk.corners:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(n) for n in lk.nodes}) == 1


def subcomplex_collapsible(S: Subcomplex):
    """is_collapsible on the materialized subcomplex."""
    return is_collapsible(materialize(S))
