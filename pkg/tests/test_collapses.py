"""Collapses, collapsibility search, and the graph capping construction."""

import pytest

from conftest import disc, torus

from npikit.collapses import (
    cap_graph,
    collapse,
    collapse_with_sequence,
    is_collapsible,
    _link_connected,
)
from npikit.complexes import (
    edge_multiplicities,
    free_faces,
    make_complex,
)
from npikit.errors import PreconditionError


def test_disc_collapses_to_point_in_two_removals():
    ok, steps = is_collapsible(disc())
    assert ok
    assert len(steps) == 2
    assert set(steps) == {("cell", "d"), ("edge", "a")}


def test_torus_is_not_collapsible():
    assert collapse(torus()) == torus()  # no free faces at all
    ok, steps = is_collapsible(torus())
    assert not ok and steps is None


def test_collapse_removes_hanging_tree():
    K = make_complex(
        ["u", "v", "w"],
        [("e", "u", "v"), ("f", "v", "w")],
        [],
    )
    collapsed, steps = collapse_with_sequence(K)
    assert len(collapsed.vertices) == 1
    assert not collapsed.edges
    assert len(steps) == 4


def test_order_sensitive_collapse_needs_backtracking():
    # Two discs sharing the free edge priority: greedy may pick either; the
    # search must find a sequence regardless of the greedy order.
    K = make_complex(
        ["u", "v"],
        [("a", "u", "v"), ("b", "u", "v"), ("c", "u", "v")],
        [("d1", [("a", 1), ("b", -1)]), ("d2", [("b", 1), ("c", -1)])],
    )
    ok, steps = is_collapsible(K)
    assert ok
    assert len(steps) == 6  # (d1,a), (d2,b), then one vertex+edge pair


def test_cap_graph_rejects_trees_and_disconnected():
    tree = make_complex(["u", "v"], [("e", "u", "v")], [])
    with pytest.raises(PreconditionError):
        cap_graph(tree)
    disconnected = make_complex(
        ["u", "v"], [("e", "u", "u"), ("f", "v", "v")], []
    )
    with pytest.raises(PreconditionError):
        cap_graph(disconnected)


def _check_cap(capped, graph):
    assert capped.vertices == graph.vertices
    assert capped.edges == graph.edges
    ok, _ = is_collapsible(capped)
    assert ok
    mult = edge_multiplicities(capped)
    assert all(mult[e] >= 1 for e in capped.edge_ids)
    assert all(_link_connected(capped, v) for v in capped.vertices)


def test_cap_single_loop():
    g = make_complex(["v"], [("e", "v", "v")], [])
    capped = cap_graph(g)
    assert len(capped.cells) == 1
    assert capped.cells[0][1] == (("e", 1),)
    _check_cap(capped, g)


def test_cap_figure_eight():
    g = make_complex(["v"], [("e", "v", "v"), ("f", "v", "v")], [])
    capped = cap_graph(g)
    assert len(capped.cells) == 2
    _check_cap(capped, g)


def test_cap_theta_graph():
    g = make_complex(
        ["u", "v"],
        [("a", "u", "v"), ("b", "u", "v"), ("c", "u", "v")],
        [],
    )
    capped = cap_graph(g)
    assert len(capped.cells) == 2
    _check_cap(capped, g)


def _random_connected_nontree(rng, max_nodes=8):
    n = rng.randint(1, max_nodes)
    vertices = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(1, n):  # spanning tree first
        edges.append((f"t{i}", vertices[rng.randrange(i)], vertices[i]))
    extra = rng.randint(1, 4)
    for j in range(extra):
        edges.append((f"x{j}", rng.choice(vertices), rng.choice(vertices)))
    return make_complex(vertices, edges, [])


def test_cap_random_graphs_satisfy_all_three_conclusions(rng):
    for _ in range(50):
        g = _random_connected_nontree(rng)
        capped = cap_graph(g)
        _check_cap(capped, g)


def test_cap_no_free_vertices_when_min_degree_two(rng):
    # On inputs without valency<=1 vertices the capped complex has no free
    # vertex either (the 1-skeleton is unchanged).
    for _ in range(20):
        g = _random_connected_nontree(rng)
        from npikit.complexes import vertex_end_counts

        if any(d <= 1 for d in vertex_end_counts(g).values()):
            continue
        capped = cap_graph(g)
        fv, _ = free_faces(capped)
        assert fv == set()
