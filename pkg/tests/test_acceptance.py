"""Acceptance gate: every criterion at its stated tolerance and time budget.

Each test prints one PASS/FAIL line; run with `pytest -s tests/test_acceptance.py`
to see them inline.  All tolerances are exact (integer identities); the time
budgets are the stated ones.
"""

import json
import random
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from conftest import random_complex, random_graph, random_subgraph

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        sys.stdout.write(f"ACCEPTANCE {name}: FAIL\n")
        raise
    elapsed = time.perf_counter() - start
    if elapsed > budget_seconds:
        sys.stdout.write(f"ACCEPTANCE {name}: FAIL (over budget: {elapsed:.1f}s)\n")
        raise AssertionError(f"{name} exceeded its {budget_seconds}s budget")
    sys.stdout.write(f"ACCEPTANCE {name}: PASS ({elapsed:.2f}s)\n")


def test_example31_fold():
    """Folding the commutator part of the commutator-HNN pair reproduces the
    presentation complex of <x,y | xyxy> exactly."""
    with criterion("fold-to-xyxy", 1.0):
        from npikit.complexes import cyclic_equal
        from npikit.formats import parse_complex
        from npikit.maps import fold_to_edge

        doc = parse_complex((CORPUS / "xyxy_pair.2cx").read_text())
        folded, q = fold_to_edge(doc.complex, doc.sub("K"), "y")
        assert folded.edge_ids == {"x", "y"}
        assert len(folded.cells) == 1
        (_, word) = folded.cells[0]
        assert cyclic_equal(word, (("x", 1), ("y", 1), ("x", 1), ("y", 1)))
        assert q.cells["r"] is None


def test_example310_certification():
    """certify npi --angles standard on the k = 1..4 pairs: tier 'relative
    collapsing NPI' with all checks green, under a second per k."""
    from npikit.cli import run

    for k in (1, 2, 3, 4):
        with criterion(f"hnn-pair-certify-k{k}", 1.0):
            code = run([
                "certify", "npi", str(CORPUS / f"hnn_pair_k{k}.2cx"),
                "--sub", "K", "--fold-edge", "y1",
                "--angles", "standard", "--format", "structured",
                "--out", "/tmp/npikit_accept_cert.json",
            ])
            assert code == 0
            report = json.loads(Path("/tmp/npikit_accept_cert.json").read_text())
            assert report["detail"]["tier"] == "relative collapsing NPI"
            checks = report["detail"]["certificate"]["checks"]
            assert checks and all(c["passed"] for c in checks)


def test_gauss_bonnet_randomized():
    """Residual exactly zero on 200 random complexes with angles in [-3, 3]."""
    with criterion("gauss-bonnet-identity", 10.0):
        from npikit.angles import all_corners, gauss_bonnet, make_angles

        rng = random.Random(31901)
        for _ in range(200):
            K = random_complex(rng, max_vertices=3, max_edges=6,
                               max_cells=4, max_word=8)
            omega = make_angles(
                K, {cid: rng.randint(-3, 3) for cid in all_corners(K)}
            )
            assert gauss_bonnet(K, omega).residual == 0


def test_strong_forest_equivalence():
    """Definitional strong relative forest equals the quotient-graph test on
    1000 random pairs, including the discriminating path example."""
    with criterion("strong-forest-quotient-equivalence", 10.0):
        from npikit.graphs import (
            is_strong_relative_forest,
            is_strong_relative_forest_quotient,
            make_graph,
        )

        path = make_graph(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c")])
        sub = make_graph(["a", "c"], [])
        assert not is_strong_relative_forest(path, sub).passed
        assert not is_strong_relative_forest_quotient(path, sub).passed

        rng = random.Random(250)
        for _ in range(1000):
            g = random_graph(rng, max_nodes=10, max_edges=15)
            s = random_subgraph(rng, g)
            assert (is_strong_relative_forest(g, s).passed
                    == is_strong_relative_forest_quotient(g, s).passed)


def test_coloring_equivalence():
    """Structural coloring test agrees with the bounded reduced-cycle oracle
    on 300 random zero/one complexes with at most 12 corners per link."""
    with criterion("coloring-test-equivalence", 60.0):
        from npikit.angles import all_corners, make_angles
        from npikit.coloring import coloring_test, coloring_test_oracle
        from npikit.complexes import link

        rng = random.Random(777)
        done = 0
        while done < 300:
            K = random_complex(rng, max_vertices=2, max_edges=5,
                               max_cells=3, max_word=6)
            if any(len(link(K, v).corners) > 12 for v in K.vertices):
                continue
            omega = make_angles(
                K, {cid: rng.randint(0, 1) for cid in all_corners(K)}
            )
            assert coloring_test(K, omega).passed == coloring_test_oracle(K, omega)
            done += 1


def test_heredity_budget_two():
    """Pulled-back pairs of enumerated immersions pass the strong test, over
    the ten corpus pairs."""
    with criterion("heredity-under-immersions", 300.0):
        from test_heredity import corpus_pairs
        from npikit.angles import pullback_angles
        from npikit.coloring import strong_relative_coloring_test
        from npikit.immersions import ImmersionBudget, enumerate_immersions
        from npikit.maps import pulled_back_pair

        total = 0
        for (name, L, K, omega) in corpus_pairs():
            for (X, f) in enumerate_immersions(L, ImmersionBudget(max_cells=2)):
                Y = pulled_back_pair(f, K)
                omega_x = pullback_angles(f, omega)
                assert strong_relative_coloring_test(X, Y, omega_x).passed, name
                total += 1
        assert total >= 10


def test_chi_comparison_and_certified_npi():
    """chi(X) <= chi(Y) on the corpus; certified k = 1, 2 pairs additionally
    have chi(X) <= 0 for every enumerated immersion at budget two."""
    with criterion("chi-comparison-audit", 600.0):
        from test_heredity import corpus_pairs
        from conftest import hnn_pair
        from npikit.complexes import euler_characteristic, free_faces
        from npikit.immersions import ImmersionBudget, enumerate_immersions
        from npikit.maps import pulled_back_pair

        for (name, L, K, omega) in corpus_pairs():
            for (X, f) in enumerate_immersions(L, ImmersionBudget(max_cells=2)):
                fv, fe = free_faces(X)
                assert not fv and not fe
                Y = pulled_back_pair(f, K)
                assert euler_characteristic(X) <= euler_characteristic(Y), name
        for k in (1, 2):
            L, _ = hnn_pair(k)
            for (X, f) in enumerate_immersions(L, ImmersionBudget(max_cells=2)):
                assert euler_characteristic(X) <= 0


def test_negative_control():
    """audit npi on <a | a^2> at budget one reports the chi = 1 violation."""
    with criterion("negative-control-aa", 1.0):
        from conftest import aa
        from npikit.immersions import ImmersionBudget, audit_npi

        report, _ = audit_npi(aa(), ImmersionBudget(max_cells=1))
        assert report.violations
        bad = report.records[report.violations[0]]
        assert bad.chi_x == 1
        assert not bad.is_point
        assert not bad.has_free_faces


def test_capping_construction():
    """cap_graph output on 50 random connected non-tree graphs: collapsible,
    every edge in a cell boundary, every link connected."""
    with criterion("graph-capping", 30.0):
        from npikit.collapses import cap_graph, is_collapsible, _link_connected
        from npikit.complexes import edge_multiplicities, make_complex

        rng = random.Random(52)
        for _ in range(50):
            n = rng.randint(1, 8)
            vertices = [f"v{i}" for i in range(n)]
            edges = [(f"t{i}", vertices[rng.randrange(i)], vertices[i])
                     for i in range(1, n)]
            for j in range(rng.randint(1, 4)):
                edges.append((f"x{j}", rng.choice(vertices), rng.choice(vertices)))
            graph = make_complex(vertices, edges, [])
            capped = cap_graph(graph)
            ok, _ = is_collapsible(capped)
            assert ok
            mult = edge_multiplicities(capped)
            assert all(mult[e] >= 1 for e in capped.edge_ids)
            assert all(_link_connected(capped, v) for v in capped.vertices)


def test_thinning_bookkeeping():
    """chi(X) - chi(X') = k - p <= 0 on ten constructed instances."""
    with criterion("thinning-bookkeeping", 60.0):
        from test_thinning import all_instances
        from npikit.thinning import thin_immersion

        instances = all_instances()
        assert len(instances) >= 10
        strict = 0
        for (L, K, omega, X, f) in instances:
            res = thin_immersion(f, K, omega)
            delta = res.hollowed_components - res.boundary_components
            assert res.chi_x - res.chi_x_prime == delta
            assert delta <= 0
            if delta < 0:
                strict += 1
        assert strict >= 1  # the double-cone instance is strictly thinned


def test_lot_pipeline():
    """The three-vertex LOT is reduced+injective with no proper sub-LOTs and
    a bi-forest structure passing the coloring test; the five-vertex corpus
    LOT certifies end-to-end."""
    with criterion("lot-pipeline", 60.0):
        from npikit.coloring import coloring_test
        from npikit.complexes import euler_characteristic
        from npikit.lot import (
            biforest_angles,
            certify_lot,
            lot_complex,
            parse_lot,
            reduction_flags,
            sub_lots,
        )

        doc = parse_lot((CORPUS / "lot123.lot").read_text())
        g = doc.log
        flags = reduction_flags(g)
        assert flags.reduced and flags.injective and g.is_tree
        assert sub_lots(g) == [(0, 1)]  # no proper sub-LOTs
        K = lot_complex(g)
        assert euler_characteristic(K) == 0
        omega = biforest_angles(K)
        assert omega is not None
        assert coloring_test(K, omega).passed

        doc5 = parse_lot((CORPUS / "lot5.lot").read_text())
        cert = certify_lot(doc5.log, doc5.sub("K"), "2")
        assert cert.conclusion == "full"
        assert all(c.passed for c in cert.checks)
