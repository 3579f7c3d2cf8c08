"""Core data model: links, Euler characteristic, essential parts, free
faces, boundary/interior, exponent heights."""

import pytest

from conftest import aa, disc, xyxy_pair, torus

from npikit.complexes import (
    boundary_interior,
    essential_part,
    euler_characteristic,
    exponent_heights,
    free_faces,
    full_subcomplex,
    link,
    make_complex,
    materialize,
    subcomplex,
)
from npikit.errors import ComplexError, ExponentSumError, PreconditionError


def test_complex_validation_rejects_unclosed_word():
    with pytest.raises(ComplexError):
        make_complex(
            ["u", "v", "w"],
            [("a", "u", "v"), ("b", "w", "u")],
            [("c", [("a", 1), ("b", 1)])],  # b starts at w, not at v
        )


def test_complex_validation_rejects_duplicate_ids():
    with pytest.raises(ComplexError):
        make_complex(["v", "v"], [], [])


def test_torus_link_matches_hand_enumeration():
    # word a b a^-1 b^-1: arrival/departure ends per position, by hand:
    # (a-,b+), (b-,a-), (a+,b-), (b+,a+)
    lk = link(torus(), "v")
    assert sorted(lk.nodes) == [("a", -1), ("a", 1), ("b", -1), ("b", 1)]
    assert [(a, b) for (_, a, b) in lk.corners] == [
        (("a", -1), ("b", 1)),
        (("b", -1), ("a", -1)),
        (("a", 1), ("b", -1)),
        (("b", 1), ("a", 1)),
    ]


def test_isolated_vertex_has_empty_link():
    K = make_complex(["v"], [], [])
    lk = link(K, "v")
    assert lk.nodes == () and lk.corners == ()


def test_aa_link_two_parallel_corners():
    lk = link(aa(), "v")
    assert sorted(lk.nodes) == [("a", -1), ("a", 1)]
    assert [(a, b) for (_, a, b) in lk.corners] == [
        (("a", -1), ("a", 1)),
        (("a", -1), ("a", 1)),
    ]


def test_link_node_multiset_matches_incidence():
    L, _ = xyxy_pair()
    for v in L.vertices:
        lk = link(L, v)
        expect = []
        for (e, src, dst) in L.edges:
            if src == v:
                expect.append((e, 1))
            if dst == v:
                expect.append((e, -1))
        assert sorted(lk.nodes) == sorted(expect)
        turns = sum(
            1
            for (_, word) in L.cells
            for i in range(len(word))
            if L.traversal_end(word[i]) == v
        )
        assert len(lk.corners) == turns


def test_euler_characteristic():
    assert euler_characteristic(make_complex(["v"], [], [])) == 1
    assert euler_characteristic(torus()) == 0


def test_essential_part_drops_unused_edge():
    K = make_complex(
        ["v"],
        [("a", "v", "v"), ("b", "v", "v")],
        [("d", [("a", 1)])],
    )
    S = full_subcomplex(K)
    ess = essential_part(K, S)
    assert ess.cells == {"d"} and ess.edges == {"a"} and ess.vertices == {"v"}
    # idempotent
    again = essential_part(K, ess)
    assert again == ess


def test_essential_part_no_cells_is_empty():
    K = make_complex(["v"], [("a", "v", "v")], [])
    ess = essential_part(K, full_subcomplex(K))
    assert ess.is_empty()


def test_free_faces():
    fv, fe = free_faces(disc())
    assert fe == {"a"} and fv == set()
    fv, fe = free_faces(torus())
    assert fv == set() and fe == set()
    K = make_complex(["u", "v"], [("e", "u", "v")], [])
    fv, fe = free_faces(K)
    assert fv == {"u", "v"} and fe == set()


def test_boundary_interior_whole_complex():
    L = torus()
    boundary, interior = boundary_interior(L, full_subcomplex(L))
    assert boundary.is_empty()
    assert interior == {"v"}


def test_boundary_interior_xyxy_pair():
    L, K = xyxy_pair()
    boundary, interior = boundary_interior(L, K)
    assert "v" in boundary.vertices
    assert interior == frozenset()


def test_boundary_interior_cell_free_sub():
    # K has no cells; its edge is used by an ambient cell, so it is boundary.
    L = disc()
    K = subcomplex(L, edges=["a"])
    boundary, interior = boundary_interior(L, K)
    assert "a" in boundary.edges
    assert "v" in boundary.vertices


def test_materialize_preserves_ids():
    L, K = xyxy_pair()
    M = materialize(K)
    assert set(M.vertex_ids) == K.vertices
    assert set(M.edge_ids) == K.edges
    assert set(M.cell_ids) == K.cells


def test_exponent_heights_single_edge():
    K = make_complex(["u", "v"], [("e", "u", "v")], [])
    heights, sinks, sources = exponent_heights(K)
    assert heights == {"u": 0, "v": 1}
    assert sources == {"u"} and sinks == {"v"}


def test_exponent_heights_loop_fails_with_witness():
    K = make_complex(["v"], [("e", "v", "v")], [])
    with pytest.raises(ExponentSumError) as err:
        exponent_heights(K)
    cycle = err.value.witness
    assert cycle == (("e", 1),)


def test_exponent_heights_requires_connected():
    K = make_complex(["u", "v"], [], [])
    with pytest.raises(PreconditionError):
        exponent_heights(K)


def test_exponent_heights_sink_edges_point_inward():
    K = make_complex(
        ["a", "b", "c"],
        [("e1", "a", "b"), ("e2", "a", "b"), ("e3", "b", "c")],
        [],
    )
    heights, sinks, sources = exponent_heights(K)
    assert sources == {"a"} and sinks == {"c"}
    for v in sinks:
        for (e, src, dst) in K.edges:
            if v in (src, dst):
                assert dst == v
