"""The coloring test and its relative and strong relative variants.

Each test is decided structurally (cell curvature bounds, forest conditions
on the weight-zero part of each link, and the placement rule for weight-one
corners).  Definitional bounded-cycle oracles are provided for the property
suite; they are never on a certification path.

lk0(v) is the subgraph of the link spanned by all nodes and the corners of
weight zero.  It is materialized as a WeightedGraph keyed by corner ids so
every module agrees on one representation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .angles import AngleStructure, cell_curvature, restrict_angles
from .complexes import Subcomplex, TwoComplex, link, materialize
from .errors import PreconditionError
from .graphs import (
    Verdict,
    WeightedGraph,
    find_reduced_cycle,
    graph_components,
    is_forest,
    is_relative_forest,
    is_strong_relative_forest,
    make_graph,
)


def link_graph(K: TwoComplex, v: str, omega: AngleStructure | None = None) -> WeightedGraph:
    """The full link as a WeightedGraph: ends as nodes, corners as edges."""
    lk = link(K, v)
    edges = [(cid, a, b) for (cid, a, b) in lk.corners]
    weights = None
    if omega is not None:
        weights = {cid: omega[cid] for (cid, _, _) in lk.corners}
    return make_graph(sorted(lk.nodes), edges, weights)


def link0_graph(K: TwoComplex, v: str, omega: AngleStructure) -> WeightedGraph:
    """lk0(v): all link nodes, only the weight-zero corners."""
    lk = link(K, v)
    edges = [(cid, a, b) for (cid, a, b) in lk.corners if omega[cid] == 0]
    return make_graph(sorted(lk.nodes), edges)


def _require_zero_one(omega: AngleStructure) -> None:
    if not omega.is_zero_one():
        raise PreconditionError("coloring tests require a zero/one angle structure")


def _component_of(components, node):
    for comp in components:
        if node in comp:
            return comp
    return None


@dataclass(frozen=True)
class ColoringReport:
    """Global verdict plus one verdict per vertex (vertex '' = cell checks)."""

    passed: bool
    per_vertex: tuple[tuple[str, Verdict], ...]
    failures: tuple[Verdict, ...]

    def __bool__(self) -> bool:
        return self.passed


def _cell_condition(K: TwoComplex, omega: AngleStructure, skip_cells=frozenset()) -> list[Verdict]:
    out = []
    for (c, _) in K.cells:
        if c in skip_cells:
            continue
        kappa = cell_curvature(K, omega, c)
        if kappa > 0:
            out.append(Verdict(False, reason="positive cell curvature",
                               witness=("cell", c, kappa)))
    return out


def coloring_test(K: TwoComplex, omega: AngleStructure) -> ColoringReport:
    """Structural coloring test.

    (1) every 2-cell has curvature <= 0; (2) lk0(v) is a forest for every
    vertex; (3) no weight-one corner has both endpoints in a single
    component of lk0(v).
    """
    _require_zero_one(omega)
    failures = list(_cell_condition(K, omega))
    per_vertex = []
    for v in sorted(K.vertices):
        verdict = _vertex_coloring_verdict(K, omega, v)
        per_vertex.append((v, verdict))
        if not verdict.passed:
            failures.append(verdict)
    return ColoringReport(not failures, tuple(per_vertex), tuple(failures))


def _vertex_coloring_verdict(K: TwoComplex, omega: AngleStructure, v: str) -> Verdict:
    lk0 = link0_graph(K, v, omega)
    forest = is_forest(lk0)
    if not forest.passed:
        return Verdict(False, reason=f"lk0({v}) contains a reduced cycle",
                       witness=("cycle", v, forest.witness))
    comps = graph_components(lk0)
    full = link_graph(K, v, omega)
    for (cid, a, b) in full.edges:
        if full.weight_by_id[cid] == 1 and _component_of(comps, a) is _component_of(comps, b):
            return Verdict(False,
                           reason="weight-one corner inside one lk0 component",
                           witness=("corner", v, cid))
    return Verdict(True)


def coloring_test_oracle(K: TwoComplex, omega: AngleStructure) -> bool:
    """Definitional test: kappa(d) <= 0 and no reduced link cycle of weight < 2."""
    _require_zero_one(omega)
    if _cell_condition(K, omega):
        return False
    for v in K.vertices:
        g = link_graph(K, v, omega)
        if find_reduced_cycle(g, weight_bound=2) is not None:
            return False
    return True


def relative_coloring_test(L: TwoComplex, K: Subcomplex,
                           omega: AngleStructure) -> ColoringReport:
    """Relative coloring test for the pair (L, K).

    (1) cells outside K have curvature <= 0; (2) lk0(v, L) is a forest
    relative to lk0(v, K); (3) a weight-one corner with both endpoints in
    one component of lk0(v, L) lies in a K-cell and its endpoints lie in one
    component of lk0(v, K).
    """
    _require_zero_one(omega)
    if K.complex != L:
        raise PreconditionError("K must be a subcomplex of L")
    failures = list(_cell_condition(L, omega, skip_cells=K.cells))
    KM = materialize(K)
    omega_K = restrict_angles(omega, K)
    per_vertex = []
    for v in sorted(L.vertices):
        verdict = _vertex_relative_verdict(L, K, KM, omega, omega_K, v, strong=False)
        per_vertex.append((v, verdict))
        if not verdict.passed:
            failures.append(verdict)
    return ColoringReport(not failures, tuple(per_vertex), tuple(failures))


def strong_relative_coloring_test(L: TwoComplex, K: Subcomplex,
                                  omega: AngleStructure) -> ColoringReport:
    """Strong relative coloring test.

    (1) ALL cells have curvature <= 0; (2) lk0(v, L) is a strong forest
    relative to lk0(v, K); (3) a weight-one corner with both endpoints in a
    single component of lk0(v, L) lies in a cell of K.
    """
    _require_zero_one(omega)
    if K.complex != L:
        raise PreconditionError("K must be a subcomplex of L")
    failures = list(_cell_condition(L, omega))
    KM = materialize(K)
    omega_K = restrict_angles(omega, K)
    per_vertex = []
    for v in sorted(L.vertices):
        verdict = _vertex_relative_verdict(L, K, KM, omega, omega_K, v, strong=True)
        per_vertex.append((v, verdict))
        if not verdict.passed:
            failures.append(verdict)
    return ColoringReport(not failures, tuple(per_vertex), tuple(failures))


def _link0_in_sub(KM: TwoComplex, omega_K: AngleStructure, v: str) -> WeightedGraph:
    if v in KM.vertex_ids:
        return link0_graph(KM, v, omega_K)
    return make_graph((), ())


def _vertex_relative_verdict(L, K, KM, omega, omega_K, v, strong: bool) -> Verdict:
    lk0_L = link0_graph(L, v, omega)
    lk0_K = _link0_in_sub(KM, omega_K, v)
    if strong:
        rel = is_strong_relative_forest(lk0_L, lk0_K)
    else:
        rel = is_relative_forest(lk0_L, lk0_K)
    if not rel.passed:
        return Verdict(False, reason=f"lk0({v}) fails the "
                       f"{'strong ' if strong else ''}relative forest condition",
                       witness=("forest", v, rel.reason, rel.witness))
    comps = graph_components(lk0_L)
    comps_K = graph_components(lk0_K)
    full = link_graph(L, v, omega)
    for (cid, a, b) in full.edges:
        if full.weight_by_id[cid] != 1:
            continue
        if _component_of(comps, a) is not _component_of(comps, b):
            continue
        cell = cid[0]
        if cell not in K.cells:
            return Verdict(False,
                           reason="weight-one corner of a non-K cell inside one lk0 component",
                           witness=("corner", v, cid))
        if not strong:
            ca = _component_of(comps_K, a)
            if ca is None or ca is not _component_of(comps_K, b):
                return Verdict(False,
                               reason="weight-one K-corner endpoints not joined in lk0(v,K)",
                               witness=("corner", v, cid))
    return Verdict(True)


def relative_coloring_test_oracle(L: TwoComplex, K: Subcomplex,
                                  omega: AngleStructure) -> bool:
    """Definitional relative test: no reduced cycle of weight < 2 in lk(v,L)
    leaving lk(v,K), and no positive-curvature cell outside K."""
    _require_zero_one(omega)
    if _cell_condition(L, omega, skip_cells=K.cells):
        return False
    for v in L.vertices:
        g = link_graph(L, v, omega)
        k_corner_ids = {cid for (cid, _, _) in g.edges if cid[0] in K.cells}
        if find_reduced_cycle(g, weight_bound=2, required_outside=k_corner_ids) is not None:
            return False
    return True
