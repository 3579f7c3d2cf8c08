"""Thinning instances: trivial, capped-disc (k = p), and a double-cone
instance whose hollowed component has a disconnected boundary (k < p)."""

import pytest

from conftest import double_comm, hnn_pair, torus

from npikit.angles import make_angles, pullback_angles, standard_angles
from npikit.certify import curvature_drop_vertices
from npikit.coloring import strong_relative_coloring_test
from npikit.complexes import (
    euler_characteristic,
    free_faces,
    full_subcomplex,
    make_complex,
    subcomplex,
)
from npikit.errors import PreconditionError
from npikit.maps import identity_map, is_immersion, make_map, pulled_back_pair
from npikit.thinning import FormalCell, thin_immersion


def capped_disc_instance(neck: int = 2):
    """X carries one disc-like preimage component whose boundary is a bigon.

    The target L is a single-vertex complex with a digon K-cell; X caps the
    digon with a disc and consumes its boundary with two long cells through
    a shared neck of ``neck`` edges.  k = p = 1.
    """
    assert neck >= 2
    neck_edges = [f"n{i}" for i in range(1, neck + 1)]
    g1 = [("a", 1), ("c1", 1)] + [(n, 1) for n in neck_edges] + [("c1", -1), ("g", 1)]
    g2 = [("b", 1), ("c2", 1)] + [(n, 1) for n in neck_edges] + [("c2", -1), ("g", 1)]
    L = make_complex(
        ["v"],
        [(e, "v", "v") for e in ["a", "b", "c1", "c2", "g"] + neck_edges],
        [("d", [("a", 1), ("b", -1)]), ("G1", g1), ("G2", g2)],
    )
    K = subcomplex(L, cells=["d"])
    t = neck
    w = {("d", 0): 0, ("d", 1): 0}
    for i in range(t + 4):
        w[("G1", i)] = 1
        w[("G2", i)] = 1
    w[("G1", 1)] = 0          # (c1-, n1+)
    w[("G1", t + 2)] = 0      # (c1+, g+)
    w[("G2", t + 1)] = 0      # (n_t-, c2-)
    w[("G2", t + 2)] = 0      # (c2+, g+)
    omega = make_angles(L, w)

    zs = [f"z{i}" for i in range(1, neck)]
    x_neck = []
    at = "u1p"
    chain = zs + ["u1p"]
    for i, n in enumerate(neck_edges):
        x_neck.append((n.upper(), at, chain[i]))
        at = chain[i]
    h1 = [("A1", 1), ("C1", 1)] + [(n.upper(), 1) for n in neck_edges] + [("C1", -1), ("G", 1)]
    h2 = [("B1", 1), ("C2", 1)] + [(n.upper(), 1) for n in neck_edges] + [("C2", -1), ("G", 1)]
    X = make_complex(
        ["u1", "u1p"] + zs,
        [("A1", "u1", "u1p"), ("B1", "u1", "u1p"),
         ("C1", "u1p", "u1p"), ("C2", "u1p", "u1p"),
         ("G", "u1p", "u1")] + x_neck,
        [("D", [("A1", 1), ("B1", -1)]), ("H1", h1), ("H2", h2)],
    )
    emap = {"A1": "a", "B1": "b", "C1": "c1", "C2": "c2", "G": "g"}
    emap.update({n.upper(): n for n in neck_edges})
    f = make_map(
        X, L,
        {x: "v" for x in X.vertices},
        emap,
        {"D": ("d", 0, False), "H1": ("G1", 0, False), "H2": ("G2", 0, False)},
    )
    return L, K, omega, X, f


def double_cone_instance():
    """One collapsible component (a cone over two disjoint bigons) whose
    boundary has two components: k = 1, p = 2, so chi strictly increases."""
    L = make_complex(
        ["v"],
        [(e, "v", "v") for e in
         ["m1", "m2", "a", "b", "c1", "c2", "n1", "n2", "g",
          "c1q", "c2q", "n1q", "n2q", "gq"]],
        [
            ("F1", [("m1", 1), ("a", 1), ("b", -1), ("m1", -1)]),
            ("F2", [("m2", 1), ("a", 1), ("b", -1), ("m2", -1)]),
            ("G1", [("a", 1), ("c1", 1), ("n1", 1), ("n2", 1), ("c1", -1), ("g", 1)]),
            ("G2", [("b", 1), ("c2", 1), ("n1", 1), ("n2", 1), ("c2", -1), ("g", 1)]),
            ("G1q", [("a", 1), ("c1q", 1), ("n1q", 1), ("n2q", 1), ("c1q", -1), ("gq", 1)]),
            ("G2q", [("b", 1), ("c2q", 1), ("n1q", 1), ("n2q", 1), ("c2q", -1), ("gq", 1)]),
        ],
    )
    K = subcomplex(L, cells=["F1", "F2"])
    w = {}
    w.update({("F1", 0): 0, ("F1", 1): 1, ("F1", 2): 0, ("F1", 3): 1})
    w.update({("F2", 0): 1, ("F2", 1): 0, ("F2", 2): 0, ("F2", 3): 1})
    for cell in ("G1", "G1q"):
        w.update({(cell, 0): 1, (cell, 1): 0, (cell, 2): 1,
                  (cell, 3): 1, (cell, 4): 0, (cell, 5): 1})
    for cell in ("G2", "G2q"):
        w.update({(cell, 0): 1, (cell, 1): 1, (cell, 2): 1,
                  (cell, 3): 0, (cell, 4): 0, (cell, 5): 1})
    omega = make_angles(L, w)

    X = make_complex(
        ["w", "u1", "u1p", "u2", "u2p", "z", "zq"],
        [
            ("M1", "w", "u1"), ("M2", "w", "u2"),
            ("A1", "u1", "u1p"), ("B1", "u1", "u1p"),
            ("A2", "u2", "u2p"), ("B2", "u2", "u2p"),
            ("C1", "u1p", "u2p"), ("C2", "u1p", "u2p"),
            ("N1", "u2p", "z"), ("N2", "z", "u2p"),
            ("G", "u1p", "u1"),
            ("C1Q", "u2p", "u1p"), ("C2Q", "u2p", "u1p"),
            ("N1Q", "u1p", "zq"), ("N2Q", "zq", "u1p"),
            ("GQ", "u2p", "u2"),
        ],
        [
            ("F1x", [("M1", 1), ("A1", 1), ("B1", -1), ("M1", -1)]),
            ("F2x", [("M2", 1), ("A2", 1), ("B2", -1), ("M2", -1)]),
            ("H1", [("A1", 1), ("C1", 1), ("N1", 1), ("N2", 1), ("C1", -1), ("G", 1)]),
            ("H2", [("B1", 1), ("C2", 1), ("N1", 1), ("N2", 1), ("C2", -1), ("G", 1)]),
            ("H1q", [("A2", 1), ("C1Q", 1), ("N1Q", 1), ("N2Q", 1), ("C1Q", -1), ("GQ", 1)]),
            ("H2q", [("B2", 1), ("C2Q", 1), ("N1Q", 1), ("N2Q", 1), ("C2Q", -1), ("GQ", 1)]),
        ],
    )
    f = make_map(
        X, L,
        {x: "v" for x in X.vertices},
        {"M1": "m1", "M2": "m2", "A1": "a", "B1": "b", "A2": "a", "B2": "b",
         "C1": "c1", "C2": "c2", "N1": "n1", "N2": "n2", "G": "g",
         "C1Q": "c1q", "C2Q": "c2q", "N1Q": "n1q", "N2Q": "n2q", "GQ": "gq"},
        {"F1x": ("F1", 0, False), "F2x": ("F2", 0, False),
         "H1": ("G1", 0, False), "H2": ("G2", 0, False),
         "H1q": ("G1q", 0, False), "H2q": ("G2q", 0, False)},
    )
    return L, K, omega, X, f


def trivial_instances():
    out = []
    for (L, K) in [hnn_pair(1), hnn_pair(2), double_comm()]:
        out.append((L, K, standard_angles(L), L, identity_map(L)))
    T = torus()
    out.append((T, full_subcomplex(T), standard_angles(T), T, identity_map(T)))
    return out


def all_instances():
    out = trivial_instances()
    for neck in (2, 3, 4, 5):
        out.append(capped_disc_instance(neck))
    out.append(double_cone_instance())
    out.append(double_cone_instance())  # run twice: determinism is part of the contract
    return out


def test_fixture_pairs_pass_strong_test():
    for (L, K, omega, X, f) in all_instances():
        assert strong_relative_coloring_test(L, K, omega).passed
        assert is_immersion(f)
        fv, fe = free_faces(X)
        assert not fv and not fe


def test_trivial_branch_returns_x_unchanged():
    L, K = hnn_pair(1)
    res = thin_immersion(identity_map(L), K, standard_angles(L))
    assert res.x_prime == L
    assert res.hollowed_components == 0 and res.boundary_components == 0
    assert res.chi_x == res.chi_x_prime


def test_capped_disc_bookkeeping():
    L, K, omega, X, f = capped_disc_instance()
    res = thin_immersion(f, K, omega)
    assert res.hollowed_components == 1
    assert res.boundary_components == 1
    assert res.chi_x - res.chi_x_prime == 0
    # the disc cell was hollowed out and replaced by a capping cell
    assert "D" not in res.x_prime.cell_ids
    formal = [t for (_, t) in res.f_prime.cell_targets if t[0] == "formal"]
    assert len(formal) == 1


def test_double_cone_strict_inequality():
    L, K, omega, X, f = double_cone_instance()
    assert euler_characteristic(X) == -3
    res = thin_immersion(f, K, omega)
    assert res.hollowed_components == 1
    assert res.boundary_components == 2
    assert res.chi_x - res.chi_x_prime == 1 - 2
    assert res.chi_x < res.chi_x_prime


def test_bookkeeping_identity_across_instances():
    for (L, K, omega, X, f) in all_instances():
        res = thin_immersion(f, K, omega)
        assert res.chi_x - res.chi_x_prime == res.hollowed_components - res.boundary_components
        assert res.hollowed_components <= res.boundary_components
        fv, fe = free_faces(res.x_prime)
        assert not fv and not fe


def test_formal_cells_have_exponent_sum_zero_words():
    from npikit.complexes import exponent_sum

    for (L, K, omega, X, f) in all_instances():
        res = thin_immersion(f, K, omega)
        for (_, target) in res.f_prime.cell_targets:
            if target[0] == "formal":
                assert exponent_sum(target[1].word) == 0


def test_formal_cell_equality_up_to_rotation():
    a = FormalCell.of((("x", 1), ("y", 1), ("x", -1)))
    b = FormalCell.of((("y", 1), ("x", -1), ("x", 1)))
    c = FormalCell.of((("x", 1), ("x", -1), ("y", -1)))  # reflection: different
    assert a == b
    assert a != c


def test_thin_rejects_bad_preconditions():
    L, K = hnn_pair(1)
    omega = standard_angles(L)
    disc_like = make_complex(["v"], [("a", "v", "v")], [("d", [("a", 1)])])
    with pytest.raises(PreconditionError):
        thin_immersion(identity_map(disc_like), subcomplex(disc_like, cells=["d"]),
                       standard_angles(disc_like))  # exponent sum 1
    L31 = None
    from conftest import xyxy_pair

    L31, K31 = xyxy_pair()
    with pytest.raises(PreconditionError):
        # (L, K) fails the strong test with standard angles
        thin_immersion(identity_map(L31), K31, standard_angles(L31))


def test_curvature_drops_on_double_cone():
    L, K, omega, X, f = double_cone_instance()
    omega_x = pullback_angles(f, omega)
    Y = pulled_back_pair(f, K)
    drops = curvature_drop_vertices(X, Y, omega_x)
    assert "u1" in drops  # lk0(u1, Y) is connected
    assert "u2p" in drops
    assert all(
        clause in ("isolated-in-boundary", "valency-one-in-boundary",
                   "lk0-connected-in-sub")
        for clauses in drops.values() for clause in clauses
    )
    # the confirmed drop count bounds chi: chi(X) <= chi(Y) - #drops
    assert euler_characteristic(X) <= euler_characteristic(Y) - len(drops)
