"""Combinatorial maps between 2-complexes, immersions, and folding.

A map sends vertices to vertices, edges to edges direction-preservingly and
each 2-cell onto a target 2-cell via a rotation offset and an optional
reflection.  With image word ``u`` (the source attaching word pushed through
the edge map), rotation ``r`` and reflection flag ``f``, the cell matches
its target word ``w`` when::

    rotate(u, r) == w                 (f unset)
    reverse_inverse(rotate(u, r)) == w  (f set)

Cells may be left unassigned (mapped to None) to record quotients that fold
2-cells away, as fold_to_edge does; such maps fail validate_map unless
partial maps are explicitly allowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .complexes import (
    CornerId,
    End,
    Subcomplex,
    TwoComplex,
    Word,
    arrival_end,
    departure_end,
    essential_part,
    link,
    rotate_word,
    word_inverse,
    exponent_sum,
)
from .errors import InternalInvariantError, MapError, PreconditionError

CellImage = tuple[str, int, bool]  # (target cell, rotation offset, reflection flag)


@dataclass(frozen=True)
class CombMap:
    source: TwoComplex
    target: TwoComplex
    vertex_map: tuple[tuple[str, str], ...]
    edge_map: tuple[tuple[str, str], ...]
    cell_map: tuple[tuple[str, CellImage | None], ...]

    @cached_property
    def vertices(self) -> dict[str, str]:
        return dict(self.vertex_map)

    @cached_property
    def edges(self) -> dict[str, str]:
        return dict(self.edge_map)

    @cached_property
    def cells(self) -> dict[str, CellImage | None]:
        return dict(self.cell_map)

    def image_word(self, word: Word) -> Word:
        return tuple((self.edges[e], s) for (e, s) in word)

    def end_image(self, end: End) -> End:
        """Edge ends map sign-preservingly (edge maps preserve direction)."""
        return (self.edges[end[0]], end[1])

    def corner_image(self, cell: str, pos: int) -> CornerId:
        """Target corner of the source corner (cell, pos).

        Without reflection position j lands at (j - r) mod n; with
        reflection at (r - j - 2) mod n, and the corner endpoints swap.
        """
        image = self.cells[cell]
        if image is None:
            raise MapError(f"cell {cell!r} is folded away; it has no corner images")
        tcell, r, refl = image
        n = len(self.source.cell_word(cell))
        if refl:
            return (tcell, (r - pos - 2) % n)
        return (tcell, (pos - r) % n)


def make_map(source, target, vertex_map, edge_map, cell_map) -> CombMap:
    return CombMap(
        source=source,
        target=target,
        vertex_map=tuple(sorted(dict(vertex_map).items())),
        edge_map=tuple(sorted(dict(edge_map).items())),
        cell_map=tuple(sorted(dict(cell_map).items())),
    )


def identity_map(K: TwoComplex) -> CombMap:
    return make_map(
        K,
        K,
        {v: v for v in K.vertices},
        {e: e for (e, _, _) in K.edges},
        {c: (c, 0, False) for (c, _) in K.cells},
    )


def validate_map(f: CombMap, allow_partial: bool = False) -> list[str]:
    """Check the CombMap invariants; returns a list of violations (empty = ok)."""
    problems = []
    src, tgt = f.source, f.target
    for v in src.vertices:
        if v not in f.vertices:
            problems.append(f"vertex {v!r} unassigned")
        elif f.vertices[v] not in tgt.vertex_ids:
            problems.append(f"vertex {v!r} maps to unknown {f.vertices[v]!r}")
    for (e, s, t) in src.edges:
        if e not in f.edges:
            problems.append(f"edge {e!r} unassigned")
            continue
        img = f.edges[e]
        if img not in tgt.edge_ids:
            problems.append(f"edge {e!r} maps to unknown {img!r}")
            continue
        if f.vertices.get(s) != tgt.edge_src(img) or f.vertices.get(t) != tgt.edge_dst(img):
            problems.append(f"edge {e!r}: endpoint images do not commute")
    for (c, word) in src.cells:
        if c not in f.cells:
            problems.append(f"cell {c!r} unassigned")
            continue
        image = f.cells[c]
        if image is None:
            if not allow_partial:
                problems.append(f"cell {c!r} is folded away in a map required to be total")
            continue
        tcell, r, refl = image
        if tcell not in tgt.cell_ids:
            problems.append(f"cell {c!r} maps to unknown {tcell!r}")
            continue
        u = rotate_word(f.image_word(word), r)
        if refl:
            u = word_inverse(u)
        if u != tgt.cell_word(tcell):
            problems.append(
                f"cell {c!r}: image word does not match target word under "
                f"rotation {r}{' with reflection' if refl else ''}"
            )
    return problems


def immersion_violations(f: CombMap) -> list[str]:
    """validate_map plus local injectivity of the induced link maps."""
    problems = validate_map(f)
    if problems:
        return problems
    for v in f.source.vertices:
        lk = link(f.source, v)
        seen_nodes: dict[End, End] = {}
        for node in lk.nodes:
            img = f.end_image(node)
            if img in seen_nodes.values():
                problems.append(f"link of {v!r}: ends collide on {img[0]!r}")
            seen_nodes[node] = img
        seen_corners: dict[CornerId, CornerId] = {}
        for ((c, i), a, b) in lk.corners:
            img = f.corner_image(c, i)
            if img in seen_corners.values():
                problems.append(f"link of {v!r}: corners collide on {img!r}")
            seen_corners[(c, i)] = img
            # consistency of the corner correspondence with the node images
            tgt_corner = _target_corner(f.target, img)
            _, r, refl = f.cells[c]
            want = (f.end_image(b), f.end_image(a)) if refl else (f.end_image(a), f.end_image(b))
            if tgt_corner != want:
                raise InternalInvariantError(
                    f"corner image endpoints inconsistent at {v!r} for cell {c!r}"
                )
    return problems


def _target_corner(K: TwoComplex, cid: CornerId) -> tuple[End, End]:
    c, i = cid
    word = K.cell_word(c)
    n = len(word)
    return (arrival_end(word[i]), departure_end(word[(i + 1) % n]))


def is_immersion(f: CombMap) -> bool:
    return not immersion_violations(f)


def compose(f: CombMap, g: CombMap) -> CombMap:
    """g after f, for f: A -> B and g: B -> C."""
    if f.target != g.source:
        raise MapError("compose: middle complexes differ")
    cells: dict[str, CellImage | None] = {}
    for (c, img) in f.cell_map:
        if img is None:
            cells[c] = None
            continue
        b, r1, s1 = img
        img2 = g.cells[b]
        if img2 is None:
            cells[c] = None
            continue
        ccell, r2, s2 = img2
        if s1:
            cells[c] = (ccell, r1 - r2, not s2)
        else:
            cells[c] = (ccell, r1 + r2, s2)
    # normalize rotations mod word length
    normalized = {}
    for c, img in cells.items():
        if img is None:
            normalized[c] = None
        else:
            n = len(f.source.cell_word(c))
            normalized[c] = (img[0], img[1] % n, img[2])
    return make_map(
        f.source,
        g.target,
        {v: g.vertices[fv] for (v, fv) in f.vertex_map},
        {e: g.edges[fe] for (e, fe) in f.edge_map},
        normalized,
    )


def preimage_subcomplex(f: CombMap, K: Subcomplex) -> Subcomplex:
    """f^{-1}(K) computed cell-wise: cells, edges and vertices mapping into K."""
    if K.complex != f.target:
        raise PreconditionError("subcomplex does not live in the map's target")
    vs = frozenset(v for v in f.source.vertices if f.vertices[v] in K.vertices)
    es = frozenset(e for e in f.source.edge_ids if f.edges[e] in K.edges)
    cs = frozenset(
        c for c in f.source.cell_ids
        if f.cells[c] is not None and f.cells[c][0] in K.cells
    )
    return Subcomplex(f.source, vs, es, cs)


def pulled_back_pair(f: CombMap, K: Subcomplex) -> Subcomplex:
    """Essential part of f^{-1}(K) (the Y of the relative definitions)."""
    return essential_part(f.source, preimage_subcomplex(f, K))


def fold_to_edge(L: TwoComplex, K: Subcomplex, y: str) -> tuple[TwoComplex, CombMap]:
    """Fold the subcomplex K of a single-vertex L onto its edge y.

    Every edge of K is renamed to y in all attaching words; cells of K (whose
    folded words are exponent-sum-zero powers of y) are deleted together with
    their corners, and the quotient map is returned with those cells
    unassigned.  The link of the vertex transforms by the two-step law:
    mixed K-corners are removed, then lk+(v,K) is identified to y+ and
    lk-(v,K) to y-; this is re-verified against the direct computation.
    """
    if len(L.vertices) != 1:
        raise PreconditionError("fold_to_edge requires a single-vertex complex")
    if K.complex != L:
        raise PreconditionError("K must be a subcomplex of L")
    if y not in K.edges:
        raise PreconditionError(f"fold edge {y!r} must lie in K")
    for c in sorted(K.cells):
        word = L.cell_word(c)
        if exponent_sum(word) != 0:
            raise PreconditionError(
                f"K-cell {c!r} has exponent sum {exponent_sum(word)}, expected 0"
            )

    v = L.vertices[0]

    def fold_edge(e: str) -> str:
        return y if e in K.edges else e

    new_edges = tuple(t for t in L.edges if t[0] == y or t[0] not in K.edges)
    new_cells = []
    for (c, word) in L.cells:
        if c in K.cells:
            folded = tuple((fold_edge(e), s) for (e, s) in word)
            if any(e != y for (e, _) in folded) or exponent_sum(folded) != 0:
                raise InternalInvariantError(
                    f"folded K-cell {c!r} is not an exponent-sum-zero power of {y!r}"
                )
            continue
        new_cells.append((c, tuple((fold_edge(e), s) for (e, s) in word)))
    folded_complex = TwoComplex(vertices=(v,), edges=new_edges, cells=tuple(new_cells))

    q = make_map(
        L,
        folded_complex,
        {v: v},
        {e: fold_edge(e) for (e, _, _) in L.edges},
        {c: (None if c in K.cells else (c, 0, False)) for (c, _) in L.cells},
    )
    bad = validate_map(q, allow_partial=True)
    if bad:
        raise InternalInvariantError(f"fold quotient map invalid: {bad}")

    _verify_fold_link_law(L, K, y, folded_complex)
    return folded_complex, q


def _verify_fold_link_law(L: TwoComplex, K: Subcomplex, y: str,
                          folded: TwoComplex) -> None:
    """lk(v, folded) must equal the two-step transform of lk(v, L)."""
    v = L.vertices[0]
    lk_L = link(L, v)

    def fold_end(end: End) -> End:
        return (y, end[1]) if end[0] in K.edges else end

    expected_nodes = sorted(set(fold_end(n) for n in lk_L.nodes))
    expected_corners = set()
    for (cid, a, b) in lk_L.corners:
        if cid[0] in K.cells:
            continue  # all K-corners vanish (mixed removed, rest collapsed)
        expected_corners.add((cid, fold_end(a), fold_end(b)))
    actual = link(folded, v)
    if sorted(actual.nodes) != expected_nodes or set(actual.corners) != expected_corners:
        raise InternalInvariantError("fold_to_edge link law violated")


def restrict_map(f: CombMap, S: Subcomplex, T: Subcomplex) -> CombMap:
    """Restriction S -> T of f, for S mapping into T."""
    from .complexes import materialize

    sub_src = materialize(S)
    sub_tgt = materialize(T)
    return make_map(
        sub_src,
        sub_tgt,
        {x: f.vertices[x] for x in S.vertices},
        {e: f.edges[e] for e in S.edges},
        {c: f.cells[c] for c in S.cells},
    )
