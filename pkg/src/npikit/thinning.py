"""Thinning a combinatorial immersion: replace collapsible chunks of the
subcomplex preimage by capping cells that map into the (never materialized)
maximal expansion of the target pair.

Given an immersion f: X -> L and the pair (L, K) passing the strong
relative coloring test, the collapsible components of Y = essential part of
f^-1(K) whose boundary has no valency-0/1 vertex are hollowed out and each
boundary component is capped with the graph-capping construction.  The new
cells carry their image boundary word as a formal expansion cell; those
words must have exponent sum zero, which is re-checked through the height
function on each hollowed component.

The returned complex X' satisfies chi(X) <= chi(X'), with
chi(X) - chi(X') = (#hollowed components) - (#boundary components) <= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .angles import AngleStructure
from .certify import PreconditionError
from .collapses import cap_graph, subcomplex_collapsible
from .complexes import (
    Subcomplex,
    TwoComplex,
    Word,
    boundary_interior,
    euler_characteristic,
    exponent_heights,
    exponent_sum,
    free_faces,
    graph_valency,
    materialize,
    rotate_word,
    subcomplex_components,
)
from .coloring import strong_relative_coloring_test
from .errors import InternalInvariantError
from .maps import CombMap, is_immersion, pulled_back_pair


@dataclass(frozen=True)
class FormalCell:
    """A 2-cell of the lazy maximal expansion: just its boundary word.

    Two formal cells are equal iff their words agree up to rotation (not
    reflection); the stored word is the minimal rotation.
    """

    word: Word

    @staticmethod
    def of(word: Word) -> "FormalCell":
        rotations = [rotate_word(word, r) for r in range(len(word))]
        return FormalCell(min(rotations))


@dataclass(frozen=True)
class LazyExpansionMap:
    """A combinatorial map into the lazy expansion of the target.

    Ordinary cells carry a CombMap-style image; capping cells carry a
    FormalCell target.
    """

    source: TwoComplex
    target: TwoComplex  # the unexpanded L; formal cells live over it
    vertex_map: tuple[tuple[str, str], ...]
    edge_map: tuple[tuple[str, str], ...]
    cell_targets: tuple[tuple[str, tuple], ...]  # ("cell", CellImage) | ("formal", FormalCell)


@dataclass(frozen=True)
class ThinResult:
    x_prime: TwoComplex
    f_prime: LazyExpansionMap
    hollowed_components: int  # k
    boundary_components: int  # p
    chi_x: int
    chi_x_prime: int


def thin_immersion(f: CombMap, K: Subcomplex,
                   omega: AngleStructure) -> ThinResult:
    """The thinning construction; see the module docstring.

    ``omega`` is the zero/one structure on L witnessing that (L, K) passes
    the strong relative coloring test (a precondition).
    """
    L = f.target
    X = f.source
    if K.complex != L:
        raise PreconditionError("K must be a subcomplex of the immersion target")
    for c in sorted(K.cells):
        if exponent_sum(L.cell_word(c)) != 0:
            raise PreconditionError(f"K-cell {c!r} has nonzero exponent sum")
    fv, fe = free_faces(X)
    if fv or fe:
        raise PreconditionError("X must have no free vertex or edge")
    if not is_immersion(f):
        raise PreconditionError("f must be an immersion")
    if not strong_relative_coloring_test(L, K, omega).passed:
        raise PreconditionError("(L, K) must pass the strong relative coloring test")

    Y = pulled_back_pair(f, K)
    components = subcomplex_components(Y)
    hollow = []
    for Yi in components:
        ok, _ = subcomplex_collapsible(Yi)
        if not ok:
            continue
        b_i, _ = boundary_interior(X, Yi)
        if any(graph_valency(b_i, v) <= 1 for v in b_i.vertices):
            continue
        hollow.append(Yi)

    k = len(hollow)
    if k == 0:
        f_prime = LazyExpansionMap(
            source=X, target=L,
            vertex_map=f.vertex_map, edge_map=f.edge_map,
            cell_targets=tuple((c, ("cell", img)) for (c, img) in f.cell_map),
        )
        chi = euler_characteristic(X)
        return ThinResult(X, f_prime, 0, 0, chi, chi)

    y_col = Subcomplex(
        X,
        frozenset().union(*(Yi.vertices for Yi in hollow)),
        frozenset().union(*(Yi.edges for Yi in hollow)),
        frozenset().union(*(Yi.cells for Yi in hollow)),
    )
    boundary, interior_vertices = boundary_interior(X, y_col)
    interior_edges = y_col.edges - boundary.edges

    # height-function chain: heights must exist on every hollowed component
    for Yi in hollow:
        try:
            exponent_heights(materialize(Yi))
        except Exception as exc:  # noqa: BLE001 - re-raise as invariant breach
            raise InternalInvariantError(
                f"collapsible component admits no height function: {exc}"
            ) from exc

    deltas = subcomplex_components(boundary)
    p = len(deltas)

    rest_vertices = tuple(v for v in X.vertices if v not in interior_vertices)
    rest_edges = tuple(t for t in X.edges if t[0] not in interior_edges)
    rest_cells = tuple(t for t in X.cells if t[0] not in y_col.cells)

    cap_cells: list[tuple[str, Word]] = []
    for delta in deltas:
        capped = cap_graph(materialize(delta))
        cap_cells.extend(capped.cells)

    x_prime = TwoComplex(
        vertices=rest_vertices,
        edges=rest_edges,
        cells=rest_cells + tuple(cap_cells),
    )

    cell_targets: dict[str, tuple] = {}
    for (c, img) in f.cell_map:
        if c in y_col.cells:
            continue
        cell_targets[c] = ("cell", img)
    for (c, word) in cap_cells:
        image_word = tuple((f.edges[e], s) for (e, s) in word)
        if exponent_sum(image_word) != 0:
            raise InternalInvariantError(
                f"capping cell {c!r} maps to a word of nonzero exponent sum"
            )
        cell_targets[c] = ("formal", FormalCell.of(image_word))

    f_prime = LazyExpansionMap(
        source=x_prime, target=L,
        vertex_map=tuple((v, img) for (v, img) in f.vertex_map if v in set(rest_vertices)),
        edge_map=tuple((e, img) for (e, img) in f.edge_map
                       if e in {t[0] for t in rest_edges}),
        cell_targets=tuple(sorted(cell_targets.items())),
    )

    chi_x = euler_characteristic(X)
    chi_x_prime = euler_characteristic(x_prime)
    if chi_x > chi_x_prime:
        raise InternalInvariantError("thinning decreased the Euler characteristic")
    fv, fe = free_faces(x_prime)
    if fv or fe:
        raise InternalInvariantError("thinned complex has a free face")
    return ThinResult(x_prime, f_prime, k, p, chi_x, chi_x_prime)
