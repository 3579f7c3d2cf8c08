"""Brute-force enumeration of combinatorial immersions into a fixed target,
plus the collapse-free Euler-characteristic audits.

An immersed complex over L is assembled from polygon copies of L's 2-cells
(each optionally reflected), with polygon sides identified in groups that
share the target edge.  Every side group becomes one edge of X, so every
edge of X lies in a cell boundary; groups of size one would be free edges
and are never generated.  Local injectivity, connectivity and freeness are
re-validated on every emitted instance, independently of search pruning.

Deduplication is up to isomorphism over the target: two instances are the
same when a complex isomorphism identifies them compatibly with the maps to
L (cell targets, edge targets, vertex targets).  The canonical key is
conservative; collisions are resolved by explicit isomorphism search, so
duplicates never slip through.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .complexes import (
    TwoComplex,
    Word,
    edge_multiplicities,
    euler_characteristic,
    free_faces,
    is_connected,
    vertex_end_counts,
    word_inverse,
)
from .errors import InternalInvariantError, PreconditionError
from .maps import CombMap, is_immersion, make_map, pulled_back_pair

from .complexes import Subcomplex


@dataclass(frozen=True)
class ImmersionBudget:
    max_cells: int = 3
    allow_reflections: bool = True
    max_configs: int | None = None  # cap on examined gluing configurations

    def __post_init__(self):
        if self.max_cells < 1:
            raise PreconditionError("budget needs max_cells >= 1")


@dataclass
class _SearchState:
    configs: int = 0
    truncated: bool = False


def _partitions_min_two(items: list) -> list[list[tuple]]:
    """All set partitions of items with every block of size >= 2."""
    if not items:
        return [[]]
    if len(items) == 1:
        return []
    first, rest = items[0], items[1:]
    out = []
    # choose the rest of first's block: any nonempty subset of rest
    n = len(rest)
    for mask in range(1, 1 << n):
        block = [first] + [rest[i] for i in range(n) if mask >> i & 1]
        remaining = [rest[i] for i in range(n) if not (mask >> i & 1)]
        for sub in _partitions_min_two(remaining):
            out.append([tuple(block)] + sub)
    return out


def enumerate_immersions(L: TwoComplex, budget: ImmersionBudget):
    """Yields (X, f) pairs; raises BudgetExceeded only through the report path.

    Use audit_npi / audit_relative for truncation-aware summaries, or
    iterate this generator directly when completion tracking is not needed.
    """
    state = _SearchState()
    yield from _enumerate(L, budget, state)


def _enumerate(L: TwoComplex, budget: ImmersionBudget, state: _SearchState):
    variants = []
    for (c, word) in sorted(L.cells):
        variants.append((c, False))
        if budget.allow_reflections:
            variants.append((c, True))
    accepted: dict = {}
    for k in range(1, budget.max_cells + 1):
        for combo in combinations_with_replacement(variants, k):
            for built in _assemblies(L, combo, budget, state):
                X, f = built
                key = _coarse_key(f)
                bucket = accepted.setdefault(key, [])
                if any(maps_equivalent(f, g) for g in bucket):
                    continue
                _revalidate(X, f)
                bucket.append(f)
                yield X, f
            if state.truncated:
                return


def _assemblies(L: TwoComplex, combo, budget: ImmersionBudget,
                state: _SearchState):
    """All side-identification structures for one multiset of cell copies.

    Backtracking over slot-to-edge-class assignments with incremental
    local-injectivity pruning: classes only merge polygon vertices, so an
    end or corner collision in a partial assembly can never be undone and
    cuts the branch immediately.
    """
    copy_words: list[Word] = []
    copy_images = []
    for (c, reflected) in combo:
        w = L.cell_word(c)
        copy_words.append(word_inverse(w) if reflected else w)
        copy_images.append((c, 0, reflected))

    corner_target: dict[tuple[int, int], tuple[str, int]] = {}
    for ci, img in enumerate(copy_images):
        cell, r, refl = img
        n = len(copy_words[ci])
        for pos in range(n):
            tpos = ((r - pos - 2) % n) if refl else ((pos - r) % n)
            corner_target[(ci, pos)] = (cell, tpos)

    slots = [(ci, i) for ci, w in enumerate(copy_words) for i in range(len(w))]
    slots.sort(key=lambda s: (copy_words[s[0]][s[1]][0], s))
    mult_L = edge_multiplicities(L)
    remaining: dict[str, int] = {}
    for (ci, i) in slots:
        e = copy_words[ci][i][0]
        remaining[e] = remaining.get(e, 0) + 1

    # union-find with rollback
    parent: dict = {}
    members: dict = {}
    trail: list = []

    def node(x):
        if x not in parent:
            parent[x] = x
            members[x] = [x] if x[0] == "pv" else []
        return x

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(node(a)), find(node(b))
        if ra == rb:
            return ra
        if len(members[ra]) > len(members[rb]):
            ra, rb = rb, ra
        parent[ra] = rb
        old_len = len(members[rb])
        members[rb].extend(members[ra])
        trail.append((ra, rb, old_len))
        return rb

    def rollback(mark):
        while len(trail) > mark:
            ra, rb, old_len = trail.pop()
            parent[ra] = ra
            del members[rb][old_len:]

    blocks: list[list[tuple[int, int]]] = []
    block_edge: list[str] = []

    def class_ok(root) -> bool:
        # corner targets at the merged vertex must be distinct
        seen = set()
        for (_, ci, j) in members[root]:
            n = len(copy_words[ci])
            tgt = corner_target[(ci, (j - 1) % n)]
            if tgt in seen:
                return False
            seen.add(tgt)
        # end targets at the merged vertex must be distinct
        ends = set()
        for bi, bslots in enumerate(blocks):
            if not bslots:
                continue
            for (side, sign) in ((("src", bi), 1), (("dst", bi), -1)):
                if side in parent and find(side) == root:
                    key = (block_edge[bi], sign)
                    if key in ends:
                        return False
                    ends.add(key)
        return True

    def assign(slot, bi) -> tuple[int, bool]:
        ci, i = slot
        n = len(copy_words[ci])
        s = copy_words[ci][i][1]
        mark = len(trail)
        pv_start, pv_end = ("pv", ci, i), ("pv", ci, (i + 1) % n)
        if s > 0:
            r1 = union(pv_start, ("src", bi))
            r2 = union(pv_end, ("dst", bi))
        else:
            r1 = union(pv_start, ("dst", bi))
            r2 = union(pv_end, ("src", bi))
        ok = class_ok(find(r1)) and class_ok(find(r2))
        return mark, ok

    def dfs(idx: int):
        if budget.max_configs is not None and state.configs >= budget.max_configs:
            state.truncated = True
            return
        state.configs += 1
        if idx == len(slots):
            if all(len(b) >= 2 for b in blocks):
                built = _finalize(L, copy_words, copy_images, blocks, block_edge)
                if built is not None:
                    yield built
            return
        ci, i = slots[idx]
        e = copy_words[ci][i][0]
        if idx > 0:
            pci, pi = slots[idx - 1]
            prev_e = copy_words[pci][pi][0]
            if prev_e != e and any(
                len(b) < 2 for bi, b in enumerate(blocks) if block_edge[bi] == prev_e
            ):
                return
        left = remaining[e]
        remaining[e] -= 1
        try:
            for bi in range(len(blocks)):
                if block_edge[bi] != e or len(blocks[bi]) >= mult_L[e]:
                    continue
                mark, ok = assign((ci, i), bi)
                if ok:
                    blocks[bi].append((ci, i))
                    deficit = sum(max(0, 2 - len(b))
                                  for bj, b in enumerate(blocks) if block_edge[bj] == e)
                    if deficit <= remaining[e]:
                        yield from dfs(idx + 1)
                    blocks[bi].pop()
                rollback(mark)
            # open a new block holding this slot
            bi = len(blocks)
            blocks.append([(ci, i)])
            block_edge.append(e)
            mark, ok = assign((ci, i), bi)
            if ok:
                deficit = sum(max(0, 2 - len(b))
                              for bj, b in enumerate(blocks) if block_edge[bj] == e)
                if deficit <= remaining[e]:
                    yield from dfs(idx + 1)
            rollback(mark)
            blocks.pop()
            block_edge.pop()
        finally:
            remaining[e] = left

    yield from dfs(0)


def _finalize(L, copy_words, copy_images, blocks, block_edge):
    groups: dict[str, list] = {}
    for bi, bslots in enumerate(blocks):
        groups.setdefault(block_edge[bi], []).append(tuple(bslots))
    group_edges = sorted(groups)
    choice = tuple(groups[e] for e in group_edges)
    return _build_instance(L, copy_words, copy_images, group_edges, choice)


def _build_instance(L, copy_words, copy_images, group_edges, choice):
    # union-find over polygon vertices and abstract edge endpoints
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    blocks: list[tuple[str, tuple]] = []  # (target edge, slots)
    slot_block: dict[tuple[int, int], int] = {}
    for e, partition in zip(group_edges, choice):
        for block in partition:
            bi = len(blocks)
            blocks.append((e, block))
            for slot in block:
                slot_block[slot] = bi

    for bi, (e, block) in enumerate(blocks):
        for (ci, i) in block:
            n = len(copy_words[ci])
            s = copy_words[ci][i][1]
            head, tail = ("src", bi), ("dst", bi)
            if s > 0:
                union(("pv", ci, i), head)
                union(("pv", ci, (i + 1) % n), tail)
            else:
                union(("pv", ci, i), tail)
                union(("pv", ci, (i + 1) % n), head)

    # name vertices canonically
    classes: dict = {}
    for ci, w in enumerate(copy_words):
        for i in range(len(w)):
            classes.setdefault(find(("pv", ci, i)), []).append((ci, i))
    class_names = {}
    for rep in sorted(classes, key=lambda r: min(classes[r])):
        class_names[rep] = f"V{len(class_names)}"

    def vertex_of(x):
        return class_names[find(x)]

    vertices = tuple(sorted(class_names.values()))
    edges = []
    for bi, (e, block) in enumerate(blocks):
        edges.append((f"E{bi}", vertex_of(("src", bi)), vertex_of(("dst", bi))))
    cells = []
    cell_ids = []
    for ci, w in enumerate(copy_words):
        word = tuple((f"E{slot_block[(ci, i)]}", s) for i, (_, s) in enumerate(w))
        cid = f"C{ci}"
        cells.append((cid, word))
        cell_ids.append(cid)

    X = TwoComplex(vertices=vertices, edges=tuple(edges), cells=tuple(cells))

    vmap = {}
    for rep, members in classes.items():
        ci, i = min(members)
        e, s = copy_words[ci][i]
        vmap[class_names[rep]] = L.edge_src(e) if s > 0 else L.edge_dst(e)
    emap = {f"E{bi}": e for bi, (e, _) in enumerate(blocks)}
    cmap = {f"C{ci}": copy_images[ci] for ci in range(len(copy_words))}
    f = make_map(X, L, vmap, emap, cmap)

    if not is_connected(X):
        return None
    if any(d < 2 for d in vertex_end_counts(X).values()):
        return None  # free vertex
    if not is_immersion(f):
        return None
    return X, f


def _revalidate(X: TwoComplex, f: CombMap) -> None:
    """Spec invariant, independent of search pruning."""
    fv, fe = free_faces(X)
    mult = edge_multiplicities(X)
    if fv or fe or not is_connected(X) or not is_immersion(f):
        raise InternalInvariantError("enumerator emitted an invalid instance")
    if any(mult[e] == 0 for e in X.edge_ids):
        raise InternalInvariantError("enumerator emitted a non-essential instance")


def _coarse_key(f: CombMap):
    X = f.source
    cell_profile = tuple(sorted(
        (img[0], len(X.cell_word(c))) for (c, img) in f.cell_map
    ))
    mult = edge_multiplicities(X)
    edge_profile = tuple(sorted(
        (f.edges[e], mult[e]) for e in X.edge_ids
    ))
    return (len(X.vertices), cell_profile, edge_profile)


def maps_equivalent(f1: CombMap, f2: CombMap) -> bool:
    """Is there an isomorphism phi of the sources with f2 . phi = f1
    (on vertices, edges and cell targets)?"""
    X1, X2 = f1.source, f2.source
    if (len(X1.vertices) != len(X2.vertices) or len(X1.edges) != len(X2.edges)
            or len(X1.cells) != len(X2.cells)):
        return False
    cells1 = sorted(X1.cell_ids)
    cells2 = sorted(X2.cell_ids)

    def candidates(c1):
        out = []
        w1 = X1.cell_word(c1)
        t1 = f1.cells[c1][0]
        for c2 in cells2:
            if f2.cells[c2][0] != t1:
                continue
            w2 = X2.cell_word(c2)
            if len(w2) != len(w1):
                continue
            n = len(w1)
            for r in range(n):
                for refl in (False, True):
                    # phi would map side i of c1 to the side of c2 aligned by
                    # (rot r, refl); labels must agree over L.
                    align = _alignment(f1, f2, c1, c2, r, refl)
                    if align is not None:
                        out.append((c2, align))
        return out

    used: set = set()
    edge_phi: dict[str, str] = {}

    def backtrack(idx: int) -> bool:
        if idx == len(cells1):
            return _check_vertex_compat(f1, f2, edge_phi)
        c1 = cells1[idx]
        for (c2, align) in candidates(c1):
            if c2 in used:
                continue
            added = []
            ok = True
            for (e1, e2) in align:
                if edge_phi.get(e1, e2) != e2:
                    ok = False
                    break
                if e1 not in edge_phi:
                    edge_phi[e1] = e2
                    added.append(e1)
            if ok and len(set(edge_phi.values())) == len(edge_phi):
                used.add(c2)
                if backtrack(idx + 1):
                    return True
                used.discard(c2)
            for e1 in added:
                del edge_phi[e1]
        return False

    return backtrack(0)


def _alignment(f1, f2, c1, c2, r, refl):
    """Edge pairing induced by matching c1's word to c2's via (rot r, refl).

    transform(word1 sides) must equal word2 with matching L-images and signs.
    """
    X1, X2 = f1.source, f2.source
    w1 = X1.cell_word(c1)
    w2 = X2.cell_word(c2)
    n = len(w1)
    pairs = []
    for j in range(n):
        if refl:
            # side at position i of w1 appears reversed at position j of w2
            i = (n - 1 - j + r) % n
            e1, s1 = w1[i]
            e2, s2 = w2[j]
            if s2 != -s1:
                return None
        else:
            i = (j + r) % n
            e1, s1 = w1[i]
            e2, s2 = w2[j]
            if s2 != s1:
                return None
        if f1.edges[e1] != f2.edges[e2]:
            return None
        pairs.append((e1, e2))
    return pairs


def _check_vertex_compat(f1, f2, edge_phi) -> bool:
    X1, X2 = f1.source, f2.source
    vertex_phi: dict[str, str] = {}
    for (e1, e2) in edge_phi.items():
        for (a, b) in ((X1.edge_src(e1), X2.edge_src(e2)),
                       (X1.edge_dst(e1), X2.edge_dst(e2))):
            if vertex_phi.get(a, b) != b:
                return False
            vertex_phi[a] = b
    if len(set(vertex_phi.values())) != len(vertex_phi):
        return False
    if len(vertex_phi) != len(X1.vertices):
        return False
    return all(f2.vertices[vertex_phi[v]] == f1.vertices[v] for v in vertex_phi)


@dataclass(frozen=True)
class InstanceRecord:
    chi_x: int
    chi_y: int | None
    is_point: bool
    has_free_faces: bool
    violates: bool
    cells: tuple[str, ...]  # target cells of the copies, sorted


@dataclass(frozen=True)
class AuditReport:
    kind: str  # "npi" | "relative"
    count: int
    records: tuple[InstanceRecord, ...]
    violations: tuple[int, ...]  # indices into records
    completed: bool
    configs_examined: int

    def ok(self) -> bool:
        return not self.violations


def _audit(L: TwoComplex, K: Subcomplex | None, budget: ImmersionBudget):
    state = _SearchState()
    records = []
    instances = []
    for (X, f) in _enumerate(L, budget, state):
        chi_x = euler_characteristic(X)
        chi_y = None
        if K is not None:
            Y = pulled_back_pair(f, K)
            chi_y = euler_characteristic(Y)
        fv, fe = free_faces(X)
        is_point = len(X.vertices) == 1 and not X.edges and not X.cells
        threshold = 0 if chi_y is None else chi_y
        violates = (not is_point) and chi_x > threshold
        records.append(InstanceRecord(
            chi_x=chi_x,
            chi_y=chi_y,
            is_point=is_point,
            has_free_faces=bool(fv or fe),
            violates=violates,
            cells=tuple(sorted(img[0] for (_, img) in f.cell_map)),
        ))
        instances.append((X, f))
    violations = tuple(i for i, r in enumerate(records) if r.violates)
    report = AuditReport(
        kind="npi" if K is None else "relative",
        count=len(records),
        records=tuple(records),
        violations=violations,
        completed=not state.truncated,
        configs_examined=state.configs,
    )
    return report, instances


def audit_npi(L: TwoComplex, budget: ImmersionBudget):
    """Flags every enumerated non-point X with chi(X) > 0."""
    return _audit(L, None, budget)


def audit_relative(L: TwoComplex, K: Subcomplex, budget: ImmersionBudget):
    """Flags every enumerated non-point X with chi(X) > chi(essential f^-1 K)."""
    if K.complex != L:
        raise PreconditionError("K must be a subcomplex of L")
    return _audit(L, K, budget)
