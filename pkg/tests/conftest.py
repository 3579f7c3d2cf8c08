"""Shared builders: the small standard complexes and randomized generators."""

import random

import pytest

from npikit.complexes import TwoComplex, make_complex, subcomplex


def torus():
    """Presentation complex of <a,b | a b a^-1 b^-1>."""
    return make_complex(
        ["v"],
        [("a", "v", "v"), ("b", "v", "v")],
        [("d", [("a", 1), ("b", 1), ("a", -1), ("b", -1)])],
    )


def disc():
    """<a | a>: one vertex, one loop, one cell along it."""
    return make_complex(["v"], [("a", "v", "v")], [("d", [("a", 1)])])


def aa():
    """<a | a^2>: the standard non-positive-immersion counterexample."""
    return make_complex(["v"], [("a", "v", "v")], [("d", [("a", 1), ("a", 1)])])


def hnn(k: int):
    """<x,y | x y^k x^-1 y^-k>."""
    word = [("x", 1)] + [("y", 1)] * k + [("x", -1)] + [("y", -1)] * k
    return make_complex(["v"], [("x", "v", "v"), ("y", "v", "v")], [("d", word)])


def hnn_pair(k: int):
    """Example pair: L = <x,y1,y2 | y1 y2 y1^-1 y2^-1, x y1^k x^-1 y2^-k>,
    K = the commutator subcomplex."""
    comm = [("y1", 1), ("y2", 1), ("y1", -1), ("y2", -1)]
    hnn_word = [("x", 1)] + [("y1", 1)] * k + [("x", -1)] + [("y2", -1)] * k
    L = make_complex(
        ["v"],
        [("x", "v", "v"), ("y1", "v", "v"), ("y2", "v", "v")],
        [("r", comm), ("s", hnn_word)],
    )
    return L, subcomplex(L, cells=["r"])


def xyxy_pair():
    """Example pair with edges named so the fold target reads <x,y | xyxy>."""
    L = make_complex(
        ["v"],
        [("x", "v", "v"), ("y", "v", "v"), ("y2", "v", "v")],
        [("r", [("y", 1), ("y2", 1), ("y", -1), ("y2", -1)]),
         ("s", [("x", 1), ("y", 1), ("x", 1), ("y2", 1)])],
    )
    return L, subcomplex(L, cells=["r"])


def double_comm():
    """<x,y,z | x y x^-1 y^-1, y z y^-1 z^-1> with K the first commutator."""
    L = make_complex(
        ["v"],
        [("x", "v", "v"), ("y", "v", "v"), ("z", "v", "v")],
        [("r", [("x", 1), ("y", 1), ("x", -1), ("y", -1)]),
         ("s", [("y", 1), ("z", 1), ("y", -1), ("z", -1)])],
    )
    return L, subcomplex(L, cells=["r"])


# --- randomized generators --------------------------------------------------

def random_complex(rng: random.Random, max_vertices=3, max_edges=6,
                   max_cells=4, max_word=8) -> TwoComplex:
    """Random valid complex: random 1-skeleton plus closed random walks."""
    nv = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(nv)]
    ne = rng.randint(1, max_edges)
    edges = []
    for i in range(ne):
        src = rng.choice(vertices)
        # bias toward connected-ish skeletons
        dst = rng.choice(vertices)
        edges.append((f"e{i}", src, dst))
    K1 = make_complex(vertices, edges, [])
    out: dict[str, list] = {v: [] for v in vertices}
    for (e, src, dst) in edges:
        out[src].append((e, 1))
        out[dst].append((e, -1))
    cells = []
    nc = rng.randint(0, max_cells)
    for ci in range(nc):
        word = _random_closed_walk(rng, K1, out, max_word)
        if word:
            cells.append((f"c{ci}", word))
    return make_complex(vertices, edges, cells)


def _random_closed_walk(rng, K1, out, max_word):
    for _ in range(40):
        start = rng.choice(K1.vertices)
        if not out[start]:
            continue
        word = []
        at = start
        target_len = rng.randint(1, max_word)
        for _ in range(max_word * 3):
            if not out[at]:
                break
            trav = rng.choice(out[at])
            word.append(trav)
            at = K1.traversal_end(trav)
            if at == start and len(word) >= target_len:
                return tuple(word)
        if word and at == start:
            return tuple(word)
    return None


def random_zero_one(rng: random.Random, K: TwoComplex):
    from npikit.angles import all_corners, make_angles

    return make_angles(K, {cid: rng.randint(0, 1) for cid in all_corners(K)})


def random_graph(rng: random.Random, max_nodes=10, max_edges=15):
    from npikit.graphs import make_graph

    n = rng.randint(1, max_nodes)
    nodes = [f"n{i}" for i in range(n)]
    m = rng.randint(0, max_edges)
    edges = []
    for i in range(m):
        a, b = rng.choice(nodes), rng.choice(nodes)
        edges.append((f"g{i}", a, b))
    return make_graph(nodes, edges)


def random_subgraph(rng: random.Random, g):
    from npikit.graphs import make_graph

    nodes = [n for n in g.nodes if rng.random() < 0.5]
    nodeset = set(nodes)
    edges = [(eid, a, b) for (eid, a, b) in g.edges
             if a in nodeset and b in nodeset and rng.random() < 0.6]
    return make_graph(nodes, edges)


@pytest.fixture
def rng():
    return random.Random(20250809)
