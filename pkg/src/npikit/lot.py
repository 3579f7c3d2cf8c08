"""Labeled oriented graphs and trees: parsing, presentation complexes,
reductions, sub-LOT analysis, the bi-forest angle search, and the
collapse-a-sub-LOT certification pipeline.

A LOG is (V, E, s, t, lambda) with source, target and label maps E -> V;
its presentation complex is the single-vertex 2-complex with one edge per
LOG vertex and one cell with word s(e) lambda(e) t(e)^-1 lambda(e)^-1 per
LOG edge.  A LOT is a LOG whose underlying graph is a tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .angles import AngleStructure, make_angles
from .certify import CheckResult, NpiCertificate, certify_mainapp
from .coloring import coloring_test
from .complexes import TwoComplex, link, subcomplex
from .errors import (
    BudgetExceededError,
    ComplexError,
    InternalInvariantError,
    PreconditionError,
)
from .formats import ParseError
from .graphs import is_forest, make_graph
from .maps import fold_to_edge

LotEdge = tuple[str, str, str]  # (source, target, label)


@dataclass(frozen=True)
class Log:
    vertices: tuple[str, ...]
    edges: tuple[LotEdge, ...]

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ComplexError("duplicate LOG vertices")
        for (s, t, lam) in self.edges:
            for x in (s, t, lam):
                if x not in vset:
                    raise ComplexError(f"LOG edge references unknown vertex {x!r}")

    @cached_property
    def is_tree(self) -> bool:
        """Underlying undirected graph is a tree (recomputed, never stored)."""
        if not self.vertices:
            return False
        if len(self.edges) != len(self.vertices) - 1:
            return False
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (s, t, _) in self.edges:
            rs, rt = find(s), find(t)
            if rs == rt:
                return False
            parent[rs] = rt
        return len({find(v) for v in self.vertices}) == 1

    def valency(self, v: str) -> int:
        deg = 0
        for (s, t, _) in self.edges:
            if s == v:
                deg += 1
            if t == v:
                deg += 1
        return deg

    def labels(self) -> tuple[str, ...]:
        return tuple(lam for (_, _, lam) in self.edges)


def make_log(vertices, edges) -> Log:
    return Log(tuple(vertices), tuple(tuple(e) for e in edges))


@dataclass(frozen=True)
class ReductionFlags:
    boundary_reduced: bool
    interior_reduced: bool
    compressed: bool
    injective: bool

    @property
    def reduced(self) -> bool:
        return self.boundary_reduced and self.interior_reduced and self.compressed


def reduction_flags(g: Log) -> ReductionFlags:
    labels = set(g.labels())
    boundary = all(v in labels for v in g.vertices if g.valency(v) == 1)
    interior = True
    seen_start: set = set()
    seen_end: set = set()
    for (s, t, lam) in g.edges:
        if (s, lam) in seen_start or (t, lam) in seen_end:
            interior = False
        seen_start.add((s, lam))
        seen_end.add((t, lam))
    compressed = all(lam not in (s, t) for (s, t, lam) in g.edges)
    injective = len(set(g.labels())) == len(g.edges)
    return ReductionFlags(boundary, interior, compressed, injective)


def core(g: Log) -> Log:
    """Fixed point of boundary reductions: repeatedly delete a valency-1
    vertex that labels no remaining edge, together with its edge."""
    vertices = list(g.vertices)
    edges = list(g.edges)
    while True:
        labels = {lam for (_, _, lam) in edges}
        candidate = None
        for v in vertices:
            deg = sum((s == v) + (t == v) for (s, t, _) in edges)
            if deg == 1 and v not in labels:
                candidate = v
                break
        if candidate is None:
            return make_log(vertices, edges)
        edges = [e for e in edges if candidate not in (e[0], e[1])]
        vertices = [v for v in vertices if v != candidate]


def reduce_log(g: Log) -> Log:
    """Apply boundary, interior and compression reductions to a fixed point.

    Interior reduction merges two edges sharing a source (or target) and a
    label, identifying the opposite endpoints; compression deletes an edge
    whose label equals an endpoint, identifying its endpoints.  On a LOT
    these moves preserve the homotopy type of the presentation complex.
    """
    vertices = list(g.vertices)
    edges = list(g.edges)

    def identify(keep: str, drop: str):
        nonlocal vertices, edges
        if keep == drop:
            return
        vertices = [v for v in vertices if v != drop]
        edges = [
            tuple(keep if x == drop else x for x in e)
            for e in edges
        ]

    changed = True
    while changed:
        changed = False
        # boundary reductions
        reduced = core(make_log(vertices, edges))
        if (len(reduced.vertices), len(reduced.edges)) != (len(vertices), len(edges)):
            vertices, edges = list(reduced.vertices), list(reduced.edges)
            changed = True
            continue
        # compression: label equals an endpoint
        for i, (s, t, lam) in enumerate(edges):
            if lam in (s, t):
                del edges[i]
                identify(s, t)
                changed = True
                break
        if changed:
            continue
        # interior reduction: equal label at a shared source or target
        for i in range(len(edges)):
            for j in range(i + 1, len(edges)):
                si, ti, li = edges[i]
                sj, tj, lj = edges[j]
                if li != lj:
                    continue
                if si == sj:
                    del edges[j]
                    identify(ti, tj)
                    changed = True
                    break
                if ti == tj:
                    del edges[j]
                    identify(si, sj)
                    changed = True
                    break
            if changed:
                break
    return make_log(vertices, edges)


def sub_lots(g: Log, max_edges: int = 20) -> list[tuple[int, ...]]:
    """Connected label-closed edge subsets with nonempty edge set, as sorted
    tuples of edge indices.  Exponential; refuses LOGs above ``max_edges``."""
    n = len(g.edges)
    if n > max_edges:
        raise BudgetExceededError(f"sub-LOT enumeration capped at {max_edges} edges")
    out = []
    # grow connected subsets from each minimal starting edge
    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for i in range(n):
        si, ti, _ = g.edges[i]
        for j in range(i + 1, n):
            sj, tj, _ = g.edges[j]
            if {si, ti} & {sj, tj}:
                adj[i].add(j)
                adj[j].add(i)

    seen: set = set()

    def grow(current: frozenset, frontier: set, start: int):
        if current in seen:
            return
        seen.add(current)
        if _label_closed(g, current):
            out.append(tuple(sorted(current)))
        for j in sorted(frontier):
            if j <= start:
                continue
            grow(current | {j}, (frontier | adj[j]) - current - {j}, start)

    for i in range(n):
        grow(frozenset([i]), set(adj[i]), i)
    return sorted(set(out))


def _label_closed(g: Log, indices) -> bool:
    endpoint_vertices = set()
    for i in indices:
        s, t, _ = g.edges[i]
        endpoint_vertices.add(s)
        endpoint_vertices.add(t)
    return all(g.edges[i][2] in endpoint_vertices for i in indices)


def _sub_log(g: Log, indices) -> Log:
    edges = [g.edges[i] for i in indices]
    vertices = sorted({x for (s, t, _) in edges for x in (s, t)})
    return make_log(vertices, edges)


def has_boundary_reducible_sublot(g: Log, max_edges: int = 20):
    """(flag, witness edge-index tuple or None): does some sub-LOT fail to be
    boundary reduced?"""
    for indices in sub_lots(g, max_edges=max_edges):
        sub = _sub_log(g, indices)
        if not reduction_flags(sub).boundary_reduced:
            return True, indices
    return False, None


def collapse_sublot(g: Log, sub_indices, v0: str) -> Log:
    """Identify the sub-LOT to v0: merge its vertices, delete its edges, and
    rename merged vertices to v0 wherever they appear (endpoints and labels)."""
    indices = set(sub_indices)
    if tuple(sorted(indices)) not in set(sub_lots(g)):
        raise PreconditionError("not a sub-LOT (connected, label-closed, nonempty)")
    sub = _sub_log(g, sorted(indices))
    if v0 not in sub.vertices:
        raise PreconditionError(f"collapse vertex {v0!r} not in the sub-LOT")
    merged = set(sub.vertices)

    def rename(x):
        return v0 if x in merged else x

    vertices = [v for v in g.vertices if v not in merged or v == v0]
    if v0 not in vertices:
        vertices.append(v0)
    edges = [
        (rename(s), rename(t), rename(lam))
        for i, (s, t, lam) in enumerate(g.edges)
        if i not in indices
    ]
    result = make_log(vertices, edges)
    if g.is_tree and not (result.is_tree or (len(result.vertices) == 1 and not result.edges)):
        raise InternalInvariantError("collapsing a sub-LOT broke tree-ness")
    return result


def lot_complex(g: Log) -> TwoComplex:
    """Presentation complex: one vertex, one edge per LOG vertex, one cell
    s(e) lambda(e) t(e)^-1 lambda(e)^-1 per LOG edge (cell ids r0, r1, ...)."""
    cells = []
    for i, (s, t, lam) in enumerate(g.edges):
        cells.append((f"r{i}", ((s, 1), (lam, 1), (t, -1), (lam, -1))))
    return TwoComplex(
        vertices=("p",),
        edges=tuple((v, "p", "p") for v in g.vertices),
        cells=tuple(cells),
    )


def biforest_angles(K: TwoComplex, max_edges: int = 24) -> AngleStructure | None:
    """Search sign assignments making both spanned halves of the link forests.

    For edges x_1..x_n and signs eps, the subgraphs spanned by the node sets
    {x_i^{eps_i}} and {x_i^{-eps_i}} must both be forests; corners inside
    either half get weight 0, all others 1.  The result is re-verified
    against the full coloring test before being returned (imported
    guarantees are search targets, not axioms).  Returns None when no
    assignment works; the search is capped at 2^max_edges.
    """
    if len(K.vertices) != 1:
        raise PreconditionError("bi-forest search expects a single-vertex complex")
    edge_ids = sorted(K.edge_ids)
    n = len(edge_ids)
    if n > max_edges:
        raise BudgetExceededError(f"bi-forest search capped at {max_edges} edges")
    v = K.vertices[0]
    lk = link(K, v)

    for t in range(2 ** n):
        eps = {edge_ids[i]: (1 if not (t >> (n - 1 - i)) & 1 else -1)
               for i in range(n)}
        side1 = {(e, eps[e]) for e in edge_ids}
        side2 = {(e, -eps[e]) for e in edge_ids}
        ok = True
        for side in (side1, side2):
            edges = [(cid, a, b) for (cid, a, b) in lk.corners
                     if a in side and b in side]
            if not is_forest(make_graph(sorted(side), edges)).passed:
                ok = False
                break
        if not ok:
            continue
        weights = {}
        for (cid, a, b) in lk.corners:
            inside = (a in side1 and b in side1) or (a in side2 and b in side2)
            weights[cid] = 0 if inside else 1
        omega = make_angles(K, weights)
        if coloring_test(K, omega).passed:
            return omega
    return None


# --- LOT text format --------------------------------------------------------
#
#   lot <name>
#   vertex <id>          (optional; inferred from edges otherwise)
#   edge <src> <dst> <label>
#   sub <name> edges <i> <j> ...   (0-based indices into edge line order)

@dataclass(frozen=True)
class LotDocument:
    name: str
    log: Log
    subs: tuple[tuple[str, tuple[int, ...]], ...]

    def sub(self, name: str) -> tuple[int, ...]:
        for (n, idx) in self.subs:
            if n == name:
                return idx
        raise ComplexError(f"no sub-LOT named {name!r}")


def parse_lot(text: str) -> LotDocument:
    name = "unnamed"
    declared: list[str] = []
    edges: list[LotEdge] = []
    subs: list[tuple[str, tuple[int, ...]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "lot":
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'lot <name>'")
            name = parts[1]
        elif parts[0] == "vertex":
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'vertex <id>'")
            declared.append(parts[1])
        elif parts[0] == "edge":
            if len(parts) != 4:
                raise ParseError(lineno, "expected 'edge <src> <dst> <label>'")
            edges.append((parts[1], parts[2], parts[3]))
        elif parts[0] == "sub":
            if len(parts) < 4 or parts[2] != "edges":
                raise ParseError(lineno, "expected 'sub <name> edges <i> ...'")
            try:
                idx = tuple(int(x) for x in parts[3:])
            except ValueError:
                raise ParseError(lineno, "edge indices must be integers") from None
            subs.append((parts[1], idx))
        else:
            raise ParseError(lineno, f"unknown directive {parts[0]!r}")
    if declared:
        vertices = declared
        known = set(declared)
        for lineno_check, (s, t, lam) in enumerate(edges):
            for x in (s, t, lam):
                if x not in known:
                    raise ParseError(0, f"edge references undeclared vertex {x!r}")
    else:
        vertices = sorted({x for (s, t, lam) in edges for x in (s, t, lam)})
    for (_, idx) in subs:
        for i in idx:
            if not 0 <= i < len(edges):
                raise ParseError(0, f"sub-LOT edge index {i} out of range")
    return LotDocument(name=name, log=make_log(vertices, edges), subs=tuple(subs))


def serialize_lot(name: str, g: Log, subs=()) -> str:
    lines = [f"lot {name}"]
    for v in g.vertices:
        lines.append(f"vertex {v}")
    for (s, t, lam) in g.edges:
        lines.append(f"edge {s} {t} {lam}")
    for (n, idx) in subs:
        lines.append(f"sub {n} edges " + " ".join(str(i) for i in idx))
    return "\n".join(lines) + "\n"


# --- certification ----------------------------------------------------------

@dataclass(frozen=True)
class LotCertificate:
    lot_text: str
    sub_edges: tuple[int, ...]
    collapse_vertex: str
    quotient_text: str
    checks: tuple[CheckResult, ...]
    pipeline: NpiCertificate | None
    sub_justification: str  # none | assumed | core-biforest | nested
    conclusion: str  # none | relative | full
    assumptions: tuple[str, ...] = ()

    def __post_init__(self):
        if self.conclusion != "none":
            if not all(c.passed for c in self.checks):
                raise InternalInvariantError("LOT conclusion exceeds its checks")
            if self.pipeline is None or not self.pipeline.certified_relative():
                raise InternalInvariantError("LOT conclusion without a fold pipeline")
        if self.conclusion == "full" and self.sub_justification in ("", "none"):
            raise InternalInvariantError("full LOT conclusion without sub-LOT NPI")

    def certified_full(self) -> bool:
        return self.conclusion == "full"


def justify_sublot_npi(g1: Log) -> tuple[str, tuple[str, ...]]:
    """Automatic justification that K(sub-LOT) has collapsing NPI.

    Reduce to the core (collapse-free immersions land there), then apply the
    bi-forest base case when the core is reduced, injective and has no
    boundary-reducible sub-LOTs; the found structure is re-verified against
    the coloring test inside biforest_angles.
    """
    gc = core(g1)
    if not gc.edges:
        return "core-graph", ()
    flags = reduction_flags(gc)
    if not (flags.reduced and flags.injective):
        return "none", (f"core of the sub-LOT is not reduced+injective",)
    reducible, witness = has_boundary_reducible_sublot(gc)
    if reducible:
        return "none", (f"core has a boundary-reducible sub-LOT {witness}",)
    omega = biforest_angles(lot_complex(gc))
    if omega is None:
        return "none", ("no bi-forest structure found on the core complex",)
    return "core-biforest", ()


def certify_lot(g: Log, sub_indices, v0: str, *,
                sub_npi=None, reduce_quotient: bool = False) -> LotCertificate:
    """Certification via collapsing a sub-LOT and folding the pair.

    ``sub_npi``: None for the automatic core/bi-forest justification,
    "assume" to record an explicit assumption, or a LotCertificate for the
    sub-LOT.

    ``reduce_quotient``: when the quotient LOT is not reduced the hypothesis
    fails and certification stops; with this flag the hypothesis checks are
    retried on the fully reduced quotient (reductions preserve the homotopy
    type) and the fact is recorded as an assumption.  The fold pipeline
    itself always runs on the true fold, so its checks stay rigorous.
    """
    checks: list[CheckResult] = []
    flags = reduction_flags(g)
    checks.append(CheckResult("lot_reduced", flags.reduced,
                              detail=str(flags)))
    checks.append(CheckResult("lot_injective", flags.injective))
    checks.append(CheckResult("lot_is_tree", g.is_tree))
    sub_ok = tuple(sorted(set(sub_indices))) in set(sub_lots(g))
    checks.append(CheckResult("sub_lot_valid", sub_ok))
    if not (flags.reduced and flags.injective and g.is_tree and sub_ok):
        return LotCertificate(
            lot_text=serialize_lot("lot", g),
            sub_edges=tuple(sorted(set(sub_indices))),
            collapse_vertex=v0,
            quotient_text="",
            checks=tuple(checks),
            pipeline=None,
            sub_justification="none",
            conclusion="none",
        )

    quotient = collapse_sublot(g, sub_indices, v0)
    qflags = reduction_flags(quotient)
    retry_assumptions: tuple[str, ...] = ()
    if qflags.reduced or not reduce_quotient:
        checks.append(CheckResult("quotient_reduced", qflags.reduced,
                                  detail=str(qflags)))
        hypothesis_lot = quotient
    else:
        reduced_quotient = reduce_log(quotient)
        rflags = reduction_flags(reduced_quotient)
        checks.append(CheckResult("quotient_reduced_after_retry", rflags.reduced,
                                  detail=str(rflags)))
        hypothesis_lot = reduced_quotient
        retry_assumptions = (
            "quotient LOT hypotheses verified only after homotopy-preserving "
            "reductions; the fold pipeline below runs on the unreduced fold",
        )
    reducible, witness = has_boundary_reducible_sublot(hypothesis_lot)
    checks.append(CheckResult(
        "quotient_no_boundary_reducible_sublot", not reducible,
        witness="" if witness is None else str(witness),
    ))

    L = lot_complex(g)
    K = subcomplex(L, cells=[f"r{i}" for i in sorted(set(sub_indices))])
    folded, _ = fold_to_edge(L, K, v0)
    expected = lot_complex(quotient)
    same = sorted(
        tuple(word) for (_, word) in folded.cells
    ) == sorted(tuple(word) for (_, word) in expected.cells) and \
        folded.edge_ids == expected.edge_ids
    if not same:
        raise InternalInvariantError("fold of K(sub-LOT) differs from K(quotient)")

    omega = biforest_angles(folded)
    checks.append(CheckResult("biforest_angles_found", omega is not None))
    pipeline = None
    if omega is not None:
        kind, assumptions = _sub_justification(g, sub_indices, sub_npi)
        pipeline = certify_mainapp(
            L, K, v0, omega,
            k_npi="assume" if kind == "assumed" else None,
            angle_source="biforest",
        )
        checks.append(CheckResult("fold_pipeline_certifies",
                                  pipeline.certified_relative()))
    else:
        kind, assumptions = "none", ()
    assumptions = retry_assumptions + tuple(assumptions)

    all_ok = all(c.passed for c in checks)
    if not all_ok or pipeline is None or not pipeline.certified_relative():
        conclusion = "none"
    elif kind == "none":
        conclusion = "relative"
    else:
        conclusion = "full"
    return LotCertificate(
        lot_text=serialize_lot("lot", g),
        sub_edges=tuple(sorted(set(sub_indices))),
        collapse_vertex=v0,
        quotient_text=serialize_lot("quotient", quotient),
        checks=tuple(checks),
        pipeline=pipeline,
        sub_justification=kind,
        conclusion=conclusion,
        assumptions=tuple(assumptions),
    )


def _sub_justification(g: Log, sub_indices, sub_npi):
    if sub_npi == "assume":
        return "assumed", ("sub-LOT collapsing non-positive immersion assumed",)
    g1 = _sub_log(g, sorted(set(sub_indices)))
    if isinstance(sub_npi, LotCertificate):
        if not sub_npi.certified_full():
            return "none", ("nested LOT certificate does not certify",)
        nested = parse_lot(sub_npi.lot_text).log
        if sorted(nested.edges) != sorted(g1.edges):
            raise PreconditionError("nested certificate is for a different sub-LOT")
        return "nested", sub_npi.assumptions
    if sub_npi is None:
        return justify_sublot_npi(g1)
    raise PreconditionError(f"unsupported sub_npi value {sub_npi!r}")
