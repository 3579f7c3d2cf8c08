"""Fold-based certification of (relative) collapsing non-positive immersion.

The pipeline folds the subcomplex K of a single-vertex complex L onto an
edge y, then checks on the folded complex: a zero/one angle structure
passing the coloring test, and y+ / y- lying in different components of the
weight-zero link.  Success certifies relative collapsing non-positive
immersion for (L, K); if K's own collapsing NPI is justified (recursively,
via a base case, or as an explicit assumption) the conclusion upgrades to
collapsing NPI for L.

Certificates are plain data, serialize to JSON with stable key order, and
embed the complex in its text format so every witness is self-contained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .angles import (
    AngleStructure,
    all_corners,
    make_angles,
    restrict_angles,
    serialize_angles,
    standard_angles,
    vertex_curvature,
)
from .complexes import (
    Subcomplex,
    TwoComplex,
    boundary_interior,
    essential_part,
    free_faces,
    graph_valency,
    materialize,
)
from .coloring import coloring_test, link0_graph, strong_relative_coloring_test
from .errors import InternalInvariantError, PreconditionError
from .formats import parse_complex, serialize_complex
from .graphs import graph_components, is_connected_graph
from .maps import fold_to_edge

CORE_CHECKS = ("k_cells_exponent_sum_zero", "folded_coloring_test", "end_separation")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witness: str = ""  # JSON-encoded witness payload, empty when passing


@dataclass(frozen=True)
class NpiCertificate:
    """Outcome of one certification run; never asserts more than its checks."""

    pair_text: str  # L in complex format with the subcomplex K inline
    fold_edge: str
    angle_source: str  # standard | supplied | search
    angles_text: str  # angle file for the folded complex ("" if fold failed)
    checks: tuple[CheckResult, ...]
    conclusion: str  # none | relative | full
    k_justification: str  # none | assumed | graph | coloring-test | nested | lot
    assumptions: tuple[str, ...] = ()
    search_state: str = ""  # "", found, none, budget-exhausted

    def __post_init__(self):
        core_ok = all(c.passed for c in self.checks if c.name in CORE_CHECKS)
        if self.conclusion in ("relative", "full") and not core_ok:
            raise InternalInvariantError("certificate conclusion exceeds its checks")
        if self.conclusion == "full" and self.k_justification in ("", "none"):
            raise InternalInvariantError(
                "certificate asserts NPI for L without a recorded K justification"
            )
        if self.k_justification == "assumed" and self.conclusion == "full":
            if not any("assum" in a for a in self.assumptions):
                raise InternalInvariantError("unverified assumption not recorded")

    def certified_relative(self) -> bool:
        return self.conclusion in ("relative", "full")

    def certified_full(self) -> bool:
        return self.conclusion == "full"

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def emit_certificate(cert: NpiCertificate) -> str:
    payload = {
        "schema_version": 1,
        "pair": cert.pair_text,
        "fold_edge": cert.fold_edge,
        "angle_source": cert.angle_source,
        "angles": cert.angles_text,
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail,
             "witness": c.witness}
            for c in cert.checks
        ],
        "conclusion": cert.conclusion,
        "k_justification": cert.k_justification,
        "assumptions": list(cert.assumptions),
        "search_state": cert.search_state,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def parse_certificate(text: str) -> NpiCertificate:
    payload = json.loads(text)
    return NpiCertificate(
        pair_text=payload["pair"],
        fold_edge=payload["fold_edge"],
        angle_source=payload["angle_source"],
        angles_text=payload["angles"],
        checks=tuple(
            CheckResult(c["name"], c["passed"], c["detail"], c["witness"])
            for c in payload["checks"]
        ),
        conclusion=payload["conclusion"],
        k_justification=payload["k_justification"],
        assumptions=tuple(payload["assumptions"]),
        search_state=payload["search_state"],
    )


def _pair_text(L: TwoComplex, K: Subcomplex) -> str:
    return serialize_complex("pair", L, subs=(("K", K),))


def _end_separation_check(folded: TwoComplex, omega: AngleStructure,
                          y: str) -> CheckResult:
    v = folded.vertices[0]
    lk0 = link0_graph(folded, v, omega)
    comps = graph_components(lk0)
    cy_plus = next(c for c in comps if (y, 1) in c)
    cy_minus = next(c for c in comps if (y, -1) in c)
    if cy_plus is cy_minus:
        return CheckResult(
            "end_separation", False,
            detail=f"{y}+ and {y}- lie in one component of lk0",
            witness=json.dumps(sorted(f"{e}{'+' if s > 0 else '-'}" for (e, s) in cy_plus)),
        )
    return CheckResult("end_separation", True,
                       detail=f"{y}+ and {y}- lie in different components of lk0")


def _standard_split_check(folded: TwoComplex, omega: AngleStructure,
                          y: str) -> CheckResult:
    """Defense in depth for the standard structure: component signs are pure,
    so the y ends cannot meet (lk+ and lk- are disjoint)."""
    v = folded.vertices[0]
    lk0 = link0_graph(folded, v, omega)
    for comp in graph_components(lk0):
        signs = {s for (_, s) in comp}
        if len(signs) > 1:
            return CheckResult(
                "standard_split", False,
                detail="a lk0 component mixes positive and negative ends",
                witness=json.dumps(sorted(map(str, comp))),
            )
    return CheckResult("standard_split", True,
                       detail="every lk0 component is sign-pure")


def _justify_k_npi(L: TwoComplex, K: Subcomplex, k_npi):
    """Returns (kind, assumptions tuple).  kind == 'none' when unjustified."""
    if k_npi is None:
        return "none", ()
    if k_npi == "assume":
        return "assumed", ("K collapsing non-positive immersion assumed, not verified",)
    if isinstance(k_npi, NpiCertificate):
        if not k_npi.certified_full():
            return "none", ("nested certificate does not certify K",)
        nested = parse_complex(k_npi.pair_text).complex
        if nested != materialize(K):
            raise PreconditionError("nested certificate is for a different complex")
        return "nested", k_npi.assumptions
    if k_npi == "auto":
        KM = materialize(K)
        if not KM.cells:
            # graphs: immersed collapse-free complexes are points or have
            # min valency 2, hence chi <= 0
            return "graph", ()
        if coloring_test(KM, standard_angles(KM)).passed:
            return "coloring-test", ()
        return "none", ("automatic K justification failed",)
    raise PreconditionError(f"unsupported k_npi value {k_npi!r}")


def certify_mainapp(L: TwoComplex, K: Subcomplex, y: str,
                    omega_bar: AngleStructure, *, k_npi=None,
                    angle_source: str = "supplied",
                    extra_checks: tuple[CheckResult, ...] = (),
                    search_state: str = "") -> NpiCertificate:
    """Certification with a supplied zero/one structure on the folded complex.

    Structural preconditions (single-vertex L, K face-closed, y in K,
    exponent-sum-zero K-cells) raise; failed checks yield a non-certifying
    certificate with witnesses.
    """
    folded, _ = fold_to_edge(L, K, y)  # raises on precondition violations
    if omega_bar.complex != folded:
        raise PreconditionError("angle structure does not live on the folded complex")
    if not omega_bar.is_zero_one():
        raise PreconditionError("certification requires a zero/one structure")

    checks = [CheckResult("k_cells_exponent_sum_zero", True,
                          detail="all K-cell words have exponent sum zero")]
    report = coloring_test(folded, omega_bar)
    if report.passed:
        checks.append(CheckResult("folded_coloring_test", True,
                                  detail="folded complex satisfies the coloring test"))
    else:
        first = report.failures[0]
        checks.append(CheckResult(
            "folded_coloring_test", False, detail=first.reason,
            witness=json.dumps([list(map(str, w)) if isinstance(w, tuple) else str(w)
                                for w in first.witness]),
        ))
    checks.append(_end_separation_check(folded, omega_bar, y))
    checks.extend(extra_checks)

    core_ok = all(c.passed for c in checks if c.name in CORE_CHECKS)
    if not core_ok:
        conclusion, kind, assumptions = "none", "none", ()
    else:
        kind, assumptions = _justify_k_npi(L, K, k_npi)
        conclusion = "full" if kind not in ("none",) else "relative"

    return NpiCertificate(
        pair_text=_pair_text(L, K),
        fold_edge=y,
        angle_source=angle_source,
        angles_text=serialize_angles(omega_bar),
        checks=tuple(checks),
        conclusion=conclusion,
        k_justification=kind,
        assumptions=assumptions,
        search_state=search_state,
    )


def certify_standard(L: TwoComplex, K: Subcomplex, y: str, *,
                     k_npi=None) -> NpiCertificate:
    """certify_mainapp with the standard zero/one structure on the fold.

    The end-separation check is automatic for the standard structure (the
    positive and negative halves of the link are disjoint) but still
    verified explicitly.
    """
    folded, _ = fold_to_edge(L, K, y)
    omega = standard_angles(folded)
    extra = (_standard_split_check(folded, omega, y),)
    return certify_mainapp(L, K, y, omega, k_npi=k_npi,
                           angle_source="standard", extra_checks=extra)


def certify_search(L: TwoComplex, K: Subcomplex, y: str, *,
                   budget: int = 2 ** 20, k_npi=None) -> NpiCertificate:
    """Try the standard structure, then exhaust zero/one assignments.

    Assignments are scanned in lexicographic order over the corners of the
    folded complex (sorted by cell id, then position; 0 before 1); the first
    assignment passing both the coloring test and the end separation wins.
    """
    standard = certify_standard(L, K, y, k_npi=k_npi)
    if standard.certified_relative():
        return replace(standard, search_state="found")
    folded, _ = fold_to_edge(L, K, y)
    corners = sorted(all_corners(folded))
    m = len(corners)
    total = 2 ** m
    scanned = 0
    for t in range(min(total, budget)):
        scanned += 1
        weights = {corners[i]: (t >> (m - 1 - i)) & 1 for i in range(m)}
        omega = make_angles(folded, weights)
        if not coloring_test(folded, omega).passed:
            continue
        if not _end_separation_check(folded, omega, y).passed:
            continue
        return certify_mainapp(L, K, y, omega, k_npi=k_npi,
                               angle_source="search", search_state="found")
    state = "none" if total <= budget else "budget-exhausted"
    return replace(standard, angle_source="search", search_state=state)


def curvature_drop_vertices(X: TwoComplex, Y: Subcomplex,
                            omega: AngleStructure) -> dict[str, tuple[str, ...]]:
    """Boundary vertices of Y where a sufficient curvature-drop clause fires.

    Clauses: valency 0 in the boundary graph, valency 1, or lk0(v, Y)
    connected.  Each reported vertex's inequality kappa(v, X) < kappa(v, Y)
    is re-verified by direct computation; the clauses are sufficient but not
    necessary, so vertices where no clause fires are not reported even if
    the inequality happens to hold.
    """
    if not strong_relative_coloring_test(X, Y, omega).passed:
        raise PreconditionError("(X, Y) must pass the strong relative coloring test")
    fv, fe = free_faces(X)
    if fv or fe:
        raise PreconditionError("X must have no free vertex or edge")
    if essential_part(X, Y) != Y:
        raise PreconditionError("Y must be essential")

    boundary, _ = boundary_interior(X, Y)
    YM = materialize(Y)
    omega_Y = restrict_angles(omega, Y)
    out: dict[str, tuple[str, ...]] = {}
    for v in sorted(boundary.vertices):
        clauses = []
        val = graph_valency(boundary, v)
        if val == 0:
            clauses.append("isolated-in-boundary")
        elif val == 1:
            clauses.append("valency-one-in-boundary")
        lk0_Y = link0_graph(YM, v, omega_Y)
        if lk0_Y.nodes and is_connected_graph(lk0_Y):
            clauses.append("lk0-connected-in-sub")
        if not clauses:
            continue
        drop = vertex_curvature(X, omega, v) < vertex_curvature(YM, omega_Y, v)
        if not drop:
            raise InternalInvariantError(
                f"curvature-drop clause fired at {v!r} but the inequality fails"
            )
        out[v] = tuple(clauses)
    return out
