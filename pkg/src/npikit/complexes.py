"""Finite combinatorial 2-complexes.

A complex has a directed 1-skeleton (vertices, directed edges) and 2-cells
attached along closed cyclic words of signed edge traversals.  The traversal
``(e, +1)`` runs the edge from source to target, ``(e, -1)`` the other way.

Edge ends are written ``(e, +1)`` for a point close to the start of ``e``
(displayed ``e+``) and ``(e, -1)`` for a point close to the end (``e-``).
The end ``e+`` lives in the link of the source vertex, ``e-`` in the link of
the target vertex.

All arithmetic here is exact integer arithmetic.  Every type is immutable
after construction; operations are pure functions of their inputs.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property

from .errors import ComplexError, ExponentSumError, PreconditionError

Sign = int  # +1 or -1
Traversal = tuple[str, int]  # (edge id, sign)
Word = tuple[Traversal, ...]
End = tuple[str, int]  # (edge id, +1 near start / -1 near end)
CornerId = tuple[str, int]  # (cell id, position in attaching word)


def inverse(t: Traversal) -> Traversal:
    return (t[0], -t[1])


def word_inverse(word: Word) -> Word:
    """Reverse the word and flip every sign."""
    return tuple((e, -s) for (e, s) in reversed(word))


def rotate_word(word: Word, r: int) -> Word:
    """Rotation sending position i to the letter at position i + r (mod n)."""
    n = len(word)
    if n == 0:
        return word
    r %= n
    return word[r:] + word[:r]


def cyclic_equal(w1: Word, w2: Word) -> bool:
    """Equality up to rotation (reflection is NOT included)."""
    if len(w1) != len(w2):
        return False
    return any(rotate_word(w1, r) == w2 for r in range(max(len(w1), 1)))


def exponent_sum(word: Word) -> int:
    return sum(s for (_, s) in word)


def format_end(end: End) -> str:
    return end[0] + ("+" if end[1] > 0 else "-")


def format_word(word: Word) -> str:
    return " ".join(e if s > 0 else "-" + e for (e, s) in word)


@dataclass(frozen=True)
class TwoComplex:
    """A finite combinatorial 2-complex.

    ``edges`` holds (id, source vertex, target vertex) triples, ``cells``
    holds (id, attaching word) pairs.  Construction validates that ids are
    unique per sort, endpoints exist and every attaching word is a nonempty
    closed path.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]
    cells: tuple[tuple[str, Word], ...]

    def __post_init__(self):
        vset = set()
        for v in self.vertices:
            if v in vset:
                raise ComplexError(f"duplicate vertex id {v!r}")
            vset.add(v)
        eids = set()
        for (e, src, dst) in self.edges:
            if e in eids:
                raise ComplexError(f"duplicate edge id {e!r}")
            eids.add(e)
            if src not in vset:
                raise ComplexError(f"edge {e!r}: unknown source vertex {src!r}")
            if dst not in vset:
                raise ComplexError(f"edge {e!r}: unknown target vertex {dst!r}")
        cids = set()
        for (c, word) in self.cells:
            if c in cids:
                raise ComplexError(f"duplicate cell id {c!r}")
            cids.add(c)
            if not word:
                raise ComplexError(f"cell {c!r}: empty attaching word")
            for (e, s) in word:
                if e not in eids:
                    raise ComplexError(f"cell {c!r}: unknown edge {e!r}")
                if s not in (1, -1):
                    raise ComplexError(f"cell {c!r}: bad sign {s!r}")
            for i, t in enumerate(word):
                nxt = word[(i + 1) % len(word)]
                if self._end_of(t) != self._start_of(nxt):
                    raise ComplexError(
                        f"cell {c!r}: attaching word not closed at position {i} "
                        f"({format_word(word)})"
                    )

    def _start_of(self, t: Traversal) -> str:
        e, s = t
        src, dst = self.edge_ends_raw(e)
        return src if s > 0 else dst

    def _end_of(self, t: Traversal) -> str:
        e, s = t
        src, dst = self.edge_ends_raw(e)
        return dst if s > 0 else src

    def edge_ends_raw(self, e: str) -> tuple[str, str]:
        try:
            return self._edge_map[e]
        except KeyError:
            raise ComplexError(f"unknown edge {e!r}") from None

    @cached_property
    def _edge_map(self) -> dict[str, tuple[str, str]]:
        return {e: (src, dst) for (e, src, dst) in self.edges}

    @cached_property
    def _cell_map(self) -> dict[str, Word]:
        return {c: w for (c, w) in self.cells}

    @property
    def vertex_ids(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @property
    def edge_ids(self) -> frozenset[str]:
        return frozenset(self._edge_map)

    @property
    def cell_ids(self) -> frozenset[str]:
        return frozenset(self._cell_map)

    def edge_src(self, e: str) -> str:
        return self.edge_ends_raw(e)[0]

    def edge_dst(self, e: str) -> str:
        return self.edge_ends_raw(e)[1]

    def cell_word(self, c: str) -> Word:
        try:
            return self._cell_map[c]
        except KeyError:
            raise ComplexError(f"unknown cell {c!r}") from None

    def traversal_start(self, t: Traversal) -> str:
        return self._start_of(t)

    def traversal_end(self, t: Traversal) -> str:
        return self._end_of(t)

    def end_vertex(self, end: End) -> str:
        """Vertex whose link contains the given edge end."""
        e, s = end
        src, dst = self.edge_ends_raw(e)
        return src if s > 0 else dst


def make_complex(vertices, edges, cells) -> TwoComplex:
    """Build a TwoComplex from iterables, normalizing words to tuples."""
    return TwoComplex(
        vertices=tuple(vertices),
        edges=tuple((e, s, t) for (e, s, t) in edges),
        cells=tuple((c, tuple((e, int(s)) for (e, s) in w)) for (c, w) in cells),
    )


def arrival_end(t: Traversal) -> End:
    """End where the traversal arrives: e- for (e,+), e+ for (e,-)."""
    return (t[0], -t[1])


def departure_end(t: Traversal) -> End:
    """End through which the traversal departs: f+ for (f,+), f- for (f,-)."""
    return (t[0], t[1])


@dataclass(frozen=True)
class LinkGraph:
    """The link of a vertex: edge ends as nodes, word corners as edges.

    ``corners`` holds ((cell, position), arrival end, departure end) triples
    ordered by cell id then position.  The corner at position i of a word
    joins the arrival end of traversal i to the departure end of traversal
    i+1 (cyclically).
    """

    vertex: str
    nodes: tuple[End, ...]
    corners: tuple[tuple[CornerId, End, End], ...]

    @property
    def euler_characteristic(self) -> int:
        return len(self.nodes) - len(self.corners)

    def corner_ids(self) -> tuple[CornerId, ...]:
        return tuple(cid for (cid, _, _) in self.corners)


def link(K: TwoComplex, v: str) -> LinkGraph:
    """Link of ``v`` in ``K``.

    Nodes are the edge ends incident to v (a loop contributes both of its
    ends); corners are the attaching-word turns made at v.  Corner ordering
    is deterministic: by cell id, then word position.
    """
    if v not in K.vertex_ids:
        raise ComplexError(f"unknown vertex {v!r}")
    nodes = []
    for (e, src, dst) in K.edges:
        if src == v:
            nodes.append((e, 1))
        if dst == v:
            nodes.append((e, -1))
    corners = []
    for (c, word) in K.cells:
        n = len(word)
        for i in range(n):
            if K.traversal_end(word[i]) == v:
                corners.append(
                    ((c, i), arrival_end(word[i]), departure_end(word[(i + 1) % n]))
                )
    corners.sort(key=lambda t: t[0])
    return LinkGraph(vertex=v, nodes=tuple(sorted(nodes)), corners=tuple(corners))


@dataclass(frozen=True)
class Subcomplex:
    """A face-closed selection of cells of an ambient complex."""

    complex: TwoComplex
    vertices: frozenset[str]
    edges: frozenset[str]
    cells: frozenset[str]

    def __post_init__(self):
        K = self.complex
        unknown = self.vertices - K.vertex_ids
        if unknown:
            raise ComplexError(f"subcomplex names unknown vertices {sorted(unknown)}")
        unknown = self.edges - K.edge_ids
        if unknown:
            raise ComplexError(f"subcomplex names unknown edges {sorted(unknown)}")
        unknown = self.cells - K.cell_ids
        if unknown:
            raise ComplexError(f"subcomplex names unknown cells {sorted(unknown)}")
        for e in self.edges:
            src, dst = K.edge_ends_raw(e)
            if src not in self.vertices or dst not in self.vertices:
                raise ComplexError(f"subcomplex not face-closed: edge {e!r} endpoint missing")
        for c in self.cells:
            for (e, _) in K.cell_word(c):
                if e not in self.edges:
                    raise ComplexError(f"subcomplex not face-closed: cell {c!r} uses edge {e!r}")

    def is_empty(self) -> bool:
        return not (self.vertices or self.edges or self.cells)


def subcomplex(K: TwoComplex, vertices=(), edges=(), cells=()) -> Subcomplex:
    """Face-closed subcomplex from the given generators.

    Edges and vertices forced by listed cells (and endpoints of listed
    edges) are added automatically.
    """
    cset = frozenset(cells)
    eset = set(edges)
    for c in cset:
        for (e, _) in K.cell_word(c):
            eset.add(e)
    vset = set(vertices)
    for e in eset:
        src, dst = K.edge_ends_raw(e)
        vset.add(src)
        vset.add(dst)
    return Subcomplex(complex=K, vertices=frozenset(vset), edges=frozenset(eset), cells=cset)


def full_subcomplex(K: TwoComplex) -> Subcomplex:
    return Subcomplex(K, K.vertex_ids, K.edge_ids, K.cell_ids)


def empty_subcomplex(K: TwoComplex) -> Subcomplex:
    return Subcomplex(K, frozenset(), frozenset(), frozenset())


def materialize(S: Subcomplex) -> TwoComplex:
    """The subcomplex as a standalone TwoComplex (ids preserved, sorted)."""
    K = S.complex
    return TwoComplex(
        vertices=tuple(sorted(S.vertices)),
        edges=tuple((e, *K.edge_ends_raw(e)) for e in sorted(S.edges)),
        cells=tuple((c, K.cell_word(c)) for c in sorted(S.cells)),
    )


def euler_characteristic(K) -> int:
    """#vertices - #edges + #cells, for a TwoComplex or Subcomplex."""
    return len(K.vertices) - len(K.edges) + len(K.cells)


def essential_part(K: TwoComplex, S: Subcomplex) -> Subcomplex:
    """Cells of S plus the edges their attaching words use and their endpoints."""
    if S.complex is not K and S.complex != K:
        raise PreconditionError("subcomplex does not reference the given complex")
    return subcomplex(K, cells=S.cells)


def edge_multiplicities(K: TwoComplex) -> Counter:
    """Total number of attaching-word occurrences per edge (signs ignored)."""
    mult: Counter = Counter()
    for (_, word) in K.cells:
        for (e, _) in word:
            mult[e] += 1
    return mult


def vertex_end_counts(K: TwoComplex) -> Counter:
    """Number of edge ends at each vertex; a loop contributes two."""
    deg: Counter = Counter()
    for (_, src, dst) in K.edges:
        deg[src] += 1
        deg[dst] += 1
    return deg


def free_faces(K: TwoComplex) -> tuple[frozenset[str], frozenset[str]]:
    """(free vertices, free edges).

    A free edge occurs exactly once across all attaching words; a free
    vertex is incident to exactly one edge end.  Isolated vertices are not
    free (they are point components).
    """
    mult = edge_multiplicities(K)
    free_edges = frozenset(e for e in K.edge_ids if mult[e] == 1)
    deg = vertex_end_counts(K)
    free_vertices = frozenset(v for v in K.vertex_ids if deg[v] == 1)
    return free_vertices, free_edges


def is_connected(K: TwoComplex) -> bool:
    if not K.vertices:
        return True
    adj: dict[str, set[str]] = {v: set() for v in K.vertices}
    for (_, src, dst) in K.edges:
        adj[src].add(dst)
        adj[dst].add(src)
    seen = {K.vertices[0]}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(K.vertices)


def subcomplex_components(S: Subcomplex) -> list[Subcomplex]:
    """Connected components of a subcomplex, as subcomplexes.

    Cells connect through their boundary edges/vertices; isolated vertices
    form their own components.
    """
    K = S.complex
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for v in S.vertices:
        parent[("v", v)] = ("v", v)
    for e in S.edges:
        parent[("e", e)] = ("e", e)
    for c in S.cells:
        parent[("c", c)] = ("c", c)
    for e in S.edges:
        src, dst = K.edge_ends_raw(e)
        union(("e", e), ("v", src))
        union(("e", e), ("v", dst))
    for c in S.cells:
        for (e, _) in K.cell_word(c):
            union(("c", c), ("e", e))
    groups: dict = {}
    for key in parent:
        groups.setdefault(find(key), []).append(key)
    out = []
    for members in groups.values():
        vs = frozenset(x for (kind, x) in members if kind == "v")
        es = frozenset(x for (kind, x) in members if kind == "e")
        cs = frozenset(x for (kind, x) in members if kind == "c")
        out.append(Subcomplex(K, vs, es, cs))
    out.sort(key=lambda s: min(s.vertices) if s.vertices else "")
    return out


def boundary_interior(L: TwoComplex, K: Subcomplex) -> tuple[Subcomplex, frozenset[str]]:
    """(boundary of K in L restricted to the 1-skeleton, interior vertices).

    A vertex is interior when its link in K equals its link in L node for
    node and corner for corner; an edge is interior when every attaching
    word occurrence of it lies in a cell of K (multiplicities agree).
    """
    KM = materialize(K)
    interior_vertices = set()
    for v in K.vertices:
        lk_L = link(L, v)
        lk_K = link(KM, v)
        if set(lk_L.nodes) == set(lk_K.nodes) and set(lk_L.corners) == set(lk_K.corners):
            interior_vertices.add(v)
    mult_L = edge_multiplicities(L)
    mult_K = edge_multiplicities(KM)
    interior_edges = {e for e in K.edges if mult_L[e] == mult_K[e]}
    b_edges = frozenset(K.edges - interior_edges)
    b_vertices = set(K.vertices - interior_vertices)
    for e in b_edges:
        src, dst = L.edge_ends_raw(e)
        b_vertices.add(src)
        b_vertices.add(dst)
    boundary = Subcomplex(L, frozenset(b_vertices), b_edges, frozenset())
    return boundary, frozenset(interior_vertices)


def graph_valency(S: Subcomplex, v: str) -> int:
    """Valency of v in the 1-skeleton of S; a loop counts twice."""
    K = S.complex
    deg = 0
    for e in S.edges:
        src, dst = K.edge_ends_raw(e)
        if src == v:
            deg += 1
        if dst == v:
            deg += 1
    return deg


def exponent_heights(K: TwoComplex):
    """Height map via a spanning tree: h(root)=0, +1 along each edge direction.

    Succeeds iff every closed path in the 1-skeleton has exponent sum zero.
    Returns (heights, sinks, sources) with sinks/sources the argmax/argmin
    vertex sets.  Raises ExponentSumError (with a witness cycle of signed
    traversals) when some non-tree edge is height-inconsistent.
    """
    if not K.vertices:
        raise PreconditionError("empty complex has no heights")
    if not is_connected(K):
        raise PreconditionError("exponent_heights requires a connected complex")
    root = min(K.vertices)
    heights: dict[str, int] = {root: 0}
    # parent traversal leading from the tree back toward the root
    parent: dict[str, tuple[str, Traversal]] = {}
    adj: dict[str, list[tuple[str, Traversal]]] = {v: [] for v in K.vertices}
    for (e, src, dst) in K.edges:
        adj[src].append((dst, (e, 1)))
        adj[dst].append((src, (e, -1)))
    for v in adj:
        adj[v].sort()
    tree_edges = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for (w, trav) in adj[v]:
            if w not in heights:
                heights[w] = heights[v] + trav[1]
                parent[w] = (v, trav)
                tree_edges.add(trav[0])
                queue.append(w)

    def path_to_root(v: str) -> list[Traversal]:
        path = []
        while v != root:
            pv, trav = parent[v]
            path.append(inverse(trav))
            v = pv
        return path

    for (e, src, dst) in sorted(K.edges):
        if e in tree_edges:
            continue
        if heights[dst] != heights[src] + 1:
            # witness: root -> src, traverse e, dst -> root
            to_src = [inverse(t) for t in reversed(path_to_root(src))]
            cycle = tuple(to_src + [(e, 1)] + path_to_root(dst))
            raise ExponentSumError(
                f"edge {e!r} is height-inconsistent: h({src})={heights[src]}, "
                f"h({dst})={heights[dst]}",
                witness=cycle,
            )
    hmin = min(heights.values())
    hmax = max(heights.values())
    sources = frozenset(v for v, h in heights.items() if h == hmin)
    sinks = frozenset(v for v, h in heights.items() if h == hmax)
    return heights, sinks, sources
