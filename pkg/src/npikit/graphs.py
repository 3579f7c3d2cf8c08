"""Undirected multigraphs with optional integer edge weights, reduced
cycles, and the forest tests behind the coloring machinery.

A reduced cycle is a cyclic sequence of directed edges with no immediate
backtrack (the next edge is never the previous one reversed, including at
the wrap-around).  Link graphs are encoded here with edge ends as nodes and
corners as edges carrying the corner weight.

The relative and strong relative forest tests each come in two independent
implementations whose agreement is property-tested:

* relative, structural: contract each component of the subgraph to a point
  and test acyclicity of what remains, plus the at-most-one-non-tree-
  component rule per ambient component;
* relative, oracle: definitional bounded search for a reduced cycle not
  inside the subgraph;
* strong, structural: relative forest plus per-component connectivity of
  the intersection with the subgraph;
* strong, quotient: contract the whole subgraph to a single vertex and
  test that the quotient is a forest.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import ComplexError, PreconditionError

# A directed edge is (edge id, +1) for a -> b or (edge id, -1) for b -> a.
DirEdge = tuple[object, int]


@dataclass(frozen=True)
class WeightedGraph:
    """Nodes plus undirected edges with ids; loops and multi-edges allowed."""

    nodes: tuple
    edges: tuple  # (edge id, endpoint a, endpoint b)
    weights: tuple = ()  # (edge id, integer), optional

    def __post_init__(self):
        nodeset = set(self.nodes)
        if len(nodeset) != len(self.nodes):
            raise ComplexError("duplicate graph nodes")
        ids = set()
        for (eid, a, b) in self.edges:
            if eid in ids:
                raise ComplexError(f"duplicate graph edge id {eid!r}")
            ids.add(eid)
            if a not in nodeset or b not in nodeset:
                raise ComplexError(f"edge {eid!r} endpoint missing from nodes")

    @cached_property
    def by_id(self) -> dict:
        return {eid: (a, b) for (eid, a, b) in self.edges}

    @cached_property
    def weight_by_id(self) -> dict:
        w = {eid: 0 for eid in self.by_id}
        w.update(dict(self.weights))
        return w

    def endpoints(self, diredge: DirEdge):
        a, b = self.by_id[diredge[0]]
        return (a, b) if diredge[1] > 0 else (b, a)

    def is_subgraph_of(self, other: "WeightedGraph") -> bool:
        return set(self.nodes) <= set(other.nodes) and all(
            e in other.edges for e in self.edges
        )


def make_graph(nodes, edges, weights=None) -> WeightedGraph:
    return WeightedGraph(
        nodes=tuple(nodes),
        edges=tuple(tuple(e) for e in edges),
        weights=tuple(sorted(weights.items())) if weights else (),
    )


@dataclass(frozen=True)
class Verdict:
    """Outcome of a graph or coloring test; failures carry a checkable witness."""

    passed: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.passed


def graph_components(g: WeightedGraph) -> list[frozenset]:
    parent = {n: n for n in g.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (_, a, b) in g.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comps: dict = {}
    for n in g.nodes:
        comps.setdefault(find(n), set()).add(n)
    return [frozenset(s) for s in comps.values()]


def is_connected_graph(g: WeightedGraph) -> bool:
    return len(graph_components(g)) <= 1


def is_forest(g: WeightedGraph) -> Verdict:
    """No reduced cycle exists: #edges = #nodes - #components and no loop."""
    n_comp = len(graph_components(g))
    if len(g.edges) == len(g.nodes) - n_comp and not any(a == b for (_, a, b) in g.edges):
        return Verdict(True)
    witness = _find_cycle_witness_bfs(g)
    return Verdict(False, reason="reduced cycle found", witness=witness)


def _find_cycle_witness_bfs(g: WeightedGraph) -> tuple[DirEdge, ...]:
    """Deterministic cycle witness via BFS forest."""
    for (eid, a, b) in g.edges:
        if a == b:
            return ((eid, 1),)
    tree: dict = {}
    seen: set = set()
    order = list(g.nodes)
    adj: dict = {n: [] for n in g.nodes}
    for (eid, a, b) in g.edges:
        adj[a].append((b, (eid, 1)))
        adj[b].append((a, (eid, -1)))
    for n in adj:
        adj[n].sort(key=repr)
    comp_of: dict = {}
    for start in order:
        if start in seen:
            continue
        seen.add(start)
        tree[start] = None
        stack = [start]
        while stack:
            v = stack.pop()
            for (w, de) in adj[v]:
                if w not in seen:
                    seen.add(w)
                    tree[w] = (v, de)
                    stack.append(w)
                    comp_of[w] = start
    tree_ids = {de[0] for t in tree.values() if t for de in [t[1]]}

    def path_from_root(x):
        out = []
        while tree[x] is not None:
            px, de = tree[x]
            out.append(de)
            x = px
        return list(reversed(out))  # root -> x

    for (eid, a, b) in g.edges:
        if eid in tree_ids or a == b:
            continue
        pa = path_from_root(a)
        pb = path_from_root(b)
        i = 0
        while i < len(pa) and i < len(pb) and pa[i] == pb[i]:
            i += 1
        a_to_lca = [(e, -d) for (e, d) in reversed(pa[i:])]
        lca_to_b = pb[i:]
        # cycle at a: a -> lca -> b, then b -> a along the non-tree edge
        return tuple(a_to_lca + lca_to_b + [(eid, -1)])
    raise PreconditionError("graph is a forest; no cycle witness exists")


def cycle_weight(g: WeightedGraph, cycle) -> int:
    return sum(g.weight_by_id[e] for (e, _) in cycle)


def is_reduced_cycle(g: WeightedGraph, cycle) -> bool:
    """Closed, and never follows an edge by its own reversal (cyclically)."""
    n = len(cycle)
    if n == 0:
        return False
    for i in range(n):
        e, d = cycle[i]
        f, c = cycle[(i + 1) % n]
        if g.endpoints(cycle[i])[1] != g.endpoints(cycle[(i + 1) % n])[0]:
            return False
        if f == e and c == -d:
            return False
    return True


def reduced_cycles_bounded(g: WeightedGraph, weight_bound: int,
                           length_bound: int) -> list[tuple[DirEdge, ...]]:
    """Exhaustive list of reduced cycles of total weight < weight_bound.

    Enumerates reduced edge-cycles up to length_bound without repeated
    directed edges, deduplicated up to rotation and reversal.  Test-only
    oracle: exponential, never on a certification path.
    """
    if weight_bound < 1 or length_bound < 1:
        raise PreconditionError("bounds must be >= 1")
    out: dict = {}
    incident: dict = {n: [] for n in g.nodes}
    for (eid, a, b) in g.edges:
        incident[a].append((eid, 1))
        incident[b].append((eid, -1))
        if a == b:
            incident[a].append((eid, -1))
            incident[b].append((eid, 1))
    # note: for loops both directions start and end at the same node
    for n in incident:
        incident[n] = sorted(set(incident[n]), key=repr)

    def canon(cycle: tuple[DirEdge, ...]):
        variants = []
        for base in (cycle, tuple((e, -d) for (e, d) in reversed(cycle))):
            for r in range(len(base)):
                variants.append(base[r:] + base[:r])
        return min(variants, key=repr)

    def extend(path: list[DirEdge], used: set, at, start, weight: int):
        if weight >= weight_bound:
            return
        for de in incident[at]:
            if de in used:
                continue
            e, d = de
            pe, pd = path[-1]
            if e == pe and d == -pd:
                continue
            a, b = g.endpoints(de)
            if a != at:
                continue
            w = weight + g.weight_by_id[e]
            if b == start:
                cyc = tuple(path + [de])
                fe, fd = cyc[0]
                if not (e == fe and d == -fd) and w < weight_bound:
                    out[canon(cyc)] = cyc
            if len(path) + 1 < length_bound:
                used.add(de)
                path.append(de)
                extend(path, used, b, start, w)
                path.pop()
                used.discard(de)

    if any(w < 0 for w in g.weight_by_id.values()):
        raise PreconditionError("cycle enumeration requires non-negative weights")
    for (eid, a, b) in sorted(g.edges, key=repr):
        for d in (1, -1):
            de = (eid, d)
            x, yy = g.endpoints(de)
            w0 = g.weight_by_id[eid]
            if x == yy and w0 < weight_bound:
                out[canon((de,))] = (de,)
            if length_bound >= 2:
                extend([de], {de}, yy, x, w0)
    return sorted(out.values(), key=repr)


def find_reduced_cycle(g: WeightedGraph, weight_bound: int | None = None,
                       required_outside=None) -> tuple[DirEdge, ...] | None:
    """First reduced cycle without repeated directed edges, with early exit.

    ``weight_bound``: only cycles of total weight < bound are reported
    (weights must be non-negative; partial sums prune the search).
    ``required_outside``: if given (a set of edge ids), the cycle must use at
    least one edge outside the set; the search then only starts on such
    edges, which keeps it fast.  Any qualifying reduced cycle can be rotated
    to start on one and stripped of repeated directed edges, so restricting
    the search loses nothing.
    """
    if weight_bound is not None and any(w < 0 for w in g.weight_by_id.values()):
        raise PreconditionError("cycle search requires non-negative weights")
    incident: dict = {n: [] for n in g.nodes}
    for (eid, a, b) in g.edges:
        incident[a].append((eid, 1))
        incident[b].append((eid, -1))
    for n in incident:
        incident[n] = sorted(set(incident[n]), key=repr)

    def weight(eid):
        return g.weight_by_id[eid] if weight_bound is not None else 0

    bound = weight_bound if weight_bound is not None else 1
    length_bound = 2 * max(len(g.edges), 1)

    def extend(path, used, at, start, w):
        fe, fd = path[0]
        pe, pd = path[-1]
        for de in incident[at]:
            if de in used:
                continue
            e, d = de
            if e == pe and d == -pd:
                continue
            a, b = g.endpoints(de)
            if a != at:
                continue
            w2 = w + weight(e)
            if w2 >= bound:
                continue
            if b == start and not (e == fe and d == -fd):
                return tuple(path + [de])
            if len(path) + 1 < length_bound:
                used.add(de)
                path.append(de)
                got = extend(path, used, b, start, w2)
                path.pop()
                used.discard(de)
                if got is not None:
                    return got
        return None

    starts = []
    for (eid, a, b) in sorted(g.edges, key=repr):
        if required_outside is not None and eid in required_outside:
            continue
        starts.append((eid, 1))
        starts.append((eid, -1))
    for de in starts:
        e, _ = de
        x, yy = g.endpoints(de)
        w0 = weight(e)
        if w0 >= bound:
            continue
        if x == yy:
            return (de,)
        got = extend([de], {de}, yy, x, w0)
        if got is not None:
            return got
    return None


def quotient_graph(g: WeightedGraph, sub: WeightedGraph) -> WeightedGraph:
    """Identify all of ``sub`` to a single vertex and delete its edges.

    With an empty subgraph the graph is returned unchanged (no phantom
    merged node), which keeps the degeneration to the absolute test exact.
    """
    _require_subgraph(g, sub)
    if not sub.nodes:
        return g
    merged = ("*merged*",)
    sub_nodes = set(sub.nodes)
    sub_edge_ids = {eid for (eid, _, _) in sub.edges}

    def image(n):
        return merged if n in sub_nodes else n

    nodes = [merged] + [n for n in g.nodes if n not in sub_nodes]
    edges = [
        (eid, image(a), image(b))
        for (eid, a, b) in g.edges
        if eid not in sub_edge_ids
    ]
    weights = {eid: g.weight_by_id[eid] for (eid, _, _) in edges}
    return make_graph(nodes, edges, weights)


def _require_subgraph(g: WeightedGraph, sub: WeightedGraph) -> None:
    if not sub.is_subgraph_of(g):
        raise PreconditionError("second graph is not a subgraph of the first")


def _contract_componentwise(g: WeightedGraph, sub: WeightedGraph) -> WeightedGraph:
    """Contract each connected component of sub to its own point."""
    comps = graph_components(sub)
    rep = {}
    for comp in comps:
        tag = ("*c*", min(map(repr, comp)))
        for n in comp:
            rep[n] = tag
    sub_edge_ids = {eid for (eid, _, _) in sub.edges}
    nodes = sorted({rep.get(n, n) for n in g.nodes}, key=repr)
    edges = [
        (eid, rep.get(a, a), rep.get(b, b))
        for (eid, a, b) in g.edges
        if eid not in sub_edge_ids
    ]
    return make_graph(nodes, edges)


def _component_subgraph(g: WeightedGraph, nodes: frozenset) -> WeightedGraph:
    edges = [(eid, a, b) for (eid, a, b) in g.edges if a in nodes]
    return make_graph(sorted(nodes, key=repr), edges,
                      {eid: g.weight_by_id[eid] for (eid, _, _) in edges})


def _intersection(g: WeightedGraph, sub: WeightedGraph, comp: frozenset) -> WeightedGraph:
    nodes = [n for n in sub.nodes if n in comp]
    nodeset = set(nodes)
    edges = [(eid, a, b) for (eid, a, b) in sub.edges if a in nodeset and b in nodeset]
    return make_graph(sorted(nodes, key=repr), edges)


def is_relative_forest(g: WeightedGraph, sub: WeightedGraph) -> Verdict:
    """Every reduced cycle of g lies in sub (structural decision).

    Decided by contracting each component of sub to a point and testing
    acyclicity of the rest, together with the rule (forced by the reduced-
    cycle definition) that a component of g may contain at most one
    non-tree component of its intersection with sub.
    """
    _require_subgraph(g, sub)
    contracted = _contract_componentwise(g, sub)
    v = is_forest(contracted)
    if not v.passed:
        return Verdict(False, reason="cycle survives contraction of the subgraph",
                       witness=v.witness)
    for comp in graph_components(g):
        inter = _intersection(g, sub, comp)
        bad = [c for c in graph_components(inter)
               if not is_forest(_component_subgraph(inter, c)).passed]
        if len(bad) > 1:
            return Verdict(
                False,
                reason="two non-tree subgraph components inside one component",
                witness=tuple(sorted(map(sorted, (map(repr, b) for b in bad[:2])))),
            )
    return Verdict(True)


def is_relative_forest_oracle(g: WeightedGraph, sub: WeightedGraph) -> Verdict:
    """Definitional bounded search: a reduced cycle using an edge outside sub.

    A qualifying cycle can always be rotated to start on a non-sub edge and
    stripped of repeated directed edges, so the early-exit search is exact.
    """
    _require_subgraph(g, sub)
    sub_ids = {eid for (eid, _, _) in sub.edges}
    flat = make_graph(g.nodes, g.edges)
    cyc = find_reduced_cycle(flat, required_outside=sub_ids)
    if cyc is not None:
        return Verdict(False, reason="reduced cycle leaves the subgraph",
                       witness=cyc)
    return Verdict(True)


def is_strong_relative_forest(g: WeightedGraph, sub: WeightedGraph) -> Verdict:
    """Relative forest with each component meeting sub emptily or connectedly."""
    rel = is_relative_forest(g, sub)
    if not rel.passed:
        return rel
    for comp in graph_components(g):
        inter = _intersection(g, sub, comp)
        if inter.nodes and not is_connected_graph(inter):
            return Verdict(
                False,
                reason="component meets the subgraph disconnectedly",
                witness=tuple(sorted(map(repr, inter.nodes))),
            )
    return Verdict(True)


def is_strong_relative_forest_quotient(g: WeightedGraph, sub: WeightedGraph) -> Verdict:
    """Quotient-graph characterization: g/sub is a forest."""
    _require_subgraph(g, sub)
    return is_forest(quotient_graph(g, sub))
