"""Command-line front end.

Subcommands: parse, links, curvature, check {coloring,relative,strong},
certify npi, audit {npi,relative}, thin, lot {check,certify}.

Exit codes: 0 = certified/pass, 1 = checked and refuted (witness printed),
2 = usage or parse error, 3 = budget exhausted / inconclusive.

Structured reports are single JSON documents with a schema_version field and
deterministic key order; witnesses embed the complex format inline.  The
--jobs flag is accepted for interface stability; execution is sequential,
which trivially meets the byte-identical-output contract across job counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .angles import gauss_bonnet, parse_angle_file, standard_angles
from .certify import certify_mainapp, certify_search, certify_standard, emit_certificate
from .coloring import coloring_test, relative_coloring_test, strong_relative_coloring_test
from .complexes import empty_subcomplex, link, format_end, euler_characteristic
from .errors import NpikitError, PreconditionError
from .formats import ParseError, parse_complex, parse_map, serialize_complex, serialize_map
from .immersions import ImmersionBudget, audit_npi, audit_relative
from .lot import certify_lot, lot_complex, parse_lot, reduction_flags
from .maps import fold_to_edge, identity_map
from .thinning import thin_immersion

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _default_max_cells() -> int:
    try:
        return max(1, int(os.environ.get("NPIKIT_MAX_CELLS", "3")))
    except ValueError:
        return 3


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="npikit")
    top.add_argument("--version", action="version", version=f"npikit {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=Path, help="also write the report to this path")
        p.add_argument("--format", choices=("human", "structured"), default="human")
        p.add_argument("--jobs", type=int, default=1,
                       help="accepted for compatibility; runs are sequential")

    p = sub.add_parser("parse", help="validate a complex document")
    p.add_argument("file", type=Path)
    common(p)

    p = sub.add_parser("links", help="print the link of every vertex")
    p.add_argument("file", type=Path)
    p.add_argument("--vertex", help="restrict to one vertex")
    common(p)

    p = sub.add_parser("curvature", help="curvature and Gauss-Bonnet report")
    p.add_argument("file", type=Path)
    p.add_argument("--angles", default="standard",
                   help="'standard' or a path to an angle file")
    common(p)

    p = sub.add_parser("check", help="run a coloring test")
    p.add_argument("variant", choices=("coloring", "relative", "strong"))
    p.add_argument("file", type=Path)
    p.add_argument("--sub", help="subcomplex name (relative/strong variants)")
    p.add_argument("--angles", default="standard")
    common(p)

    p = sub.add_parser("certify", help="fold-based NPI certification")
    p.add_argument("what", choices=("npi",))
    p.add_argument("file", type=Path)
    p.add_argument("--sub", required=True)
    p.add_argument("--fold-edge", required=True)
    p.add_argument("--angles", default="standard",
                   help="'standard', 'search', or a path to an angle file")
    p.add_argument("--k-npi", choices=("none", "auto", "assume"), default="none")
    p.add_argument("--search-budget", type=int, default=2 ** 20)
    common(p)

    p = sub.add_parser("audit", help="brute-force immersion audit")
    p.add_argument("what", choices=("npi", "relative"))
    p.add_argument("file", type=Path)
    p.add_argument("--sub")
    p.add_argument("--max-cells", type=int, default=_default_max_cells())
    p.add_argument("--no-reflections", action="store_true")
    p.add_argument("--max-configs", type=int)
    p.add_argument("--dump-instances", type=Path)
    common(p)

    p = sub.add_parser("thin", help="thin an immersion over a pair")
    p.add_argument("file", type=Path, help="the immersed complex X (or L itself)")
    p.add_argument("--target", type=Path,
                   help="target document (defaults to FILE with the identity map)")
    p.add_argument("--map", type=Path, dest="map_file",
                   help="map block X -> target (defaults to the identity)")
    p.add_argument("--sub", required=True)
    p.add_argument("--angles", default="standard")
    common(p)

    p = sub.add_parser("lot", help="labeled oriented tree front end")
    p.add_argument("what", choices=("check", "certify"))
    p.add_argument("file", type=Path)
    p.add_argument("--sub", help="declared sub-LOT name (certify)")
    p.add_argument("--collapse-vertex", help="vertex the sub-LOT collapses to")
    p.add_argument("--sub-npi", choices=("auto", "assume"), default="auto")
    common(p)

    return top


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _load_angles(spec: str, K):
    if spec == "standard":
        return standard_angles(K)
    return parse_angle_file(_read(Path(spec)), K)


def _resolve_sub(doc, name):
    if name is None:
        return empty_subcomplex(doc.complex)
    return doc.sub(name)


def _report(command: str, status: str, exit_code: int, detail: dict,
            witnesses=()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
        "exit_code": exit_code,
        "detail": detail,
        "witnesses": list(witnesses),
    }


def _verdict_witnesses(report) -> list:
    out = []
    for v in report.failures:
        out.append({"reason": v.reason, "witness": _jsonable(v.witness)})
    return out


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(y) for y in x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for (k, v) in x.items()}
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    return str(x)


def cmd_parse(args) -> tuple[int, dict]:
    doc = parse_complex(_read(args.file))
    K = doc.complex
    detail = {
        "name": doc.name,
        "vertices": len(K.vertices),
        "edges": len(K.edges),
        "cells": len(K.cells),
        "euler_characteristic": euler_characteristic(K),
        "subcomplexes": doc.sub_names(),
    }
    return EXIT_PASS, _report("parse", "pass", EXIT_PASS, detail)


def cmd_links(args) -> tuple[int, dict]:
    doc = parse_complex(_read(args.file))
    K = doc.complex
    vertices = [args.vertex] if args.vertex else list(K.vertices)
    links = {}
    for v in vertices:
        lk = link(K, v)
        links[v] = {
            "nodes": [format_end(n) for n in lk.nodes],
            "corners": [
                {"corner": [cid[0], cid[1]],
                 "ends": [format_end(a), format_end(b)]}
                for (cid, a, b) in lk.corners
            ],
        }
    return EXIT_PASS, _report("links", "pass", EXIT_PASS, {"links": links})


def cmd_curvature(args) -> tuple[int, dict]:
    doc = parse_complex(_read(args.file))
    K = doc.complex
    omega = _load_angles(args.angles, K)
    rep = gauss_bonnet(K, omega)
    detail = {
        "vertex_curvatures": dict(rep.vertex_curvatures),
        "cell_curvatures": dict(rep.cell_curvatures),
        "euler_characteristic": rep.euler_characteristic,
        "residual": rep.residual,
    }
    return EXIT_PASS, _report("curvature", "pass", EXIT_PASS, detail)


def cmd_check(args) -> tuple[int, dict]:
    doc = parse_complex(_read(args.file))
    L = doc.complex
    omega = _load_angles(args.angles, L)
    if args.variant == "coloring":
        report = coloring_test(L, omega)
    else:
        K = _resolve_sub(doc, args.sub)
        if args.variant == "relative":
            report = relative_coloring_test(L, K, omega)
        else:
            report = strong_relative_coloring_test(L, K, omega)
    status = "pass" if report.passed else "fail"
    code = EXIT_PASS if report.passed else EXIT_REFUTED
    detail = {
        "variant": args.variant,
        "passed": report.passed,
        "per_vertex": {v: verdict.passed for (v, verdict) in report.per_vertex},
    }
    return code, _report(f"check {args.variant}", status, code, detail,
                         _verdict_witnesses(report))


def cmd_certify(args) -> tuple[int, dict]:
    doc = parse_complex(_read(args.file))
    L = doc.complex
    K = doc.sub(args.sub)
    y = args.fold_edge
    k_npi = None if args.k_npi == "none" else args.k_npi
    if args.angles == "standard":
        cert = certify_standard(L, K, y, k_npi=k_npi)
    elif args.angles == "search":
        cert = certify_search(L, K, y, budget=args.search_budget, k_npi=k_npi)
    else:
        folded, _ = fold_to_edge(L, K, y)
        omega = parse_angle_file(_read(Path(args.angles)), folded)
        cert = certify_mainapp(L, K, y, omega)
    if cert.certified_relative():
        status, code = "pass", EXIT_PASS
    elif cert.search_state == "budget-exhausted":
        status, code = "inconclusive", EXIT_INCONCLUSIVE
    else:
        status, code = "fail", EXIT_REFUTED
    detail = {
        "conclusion": cert.conclusion,
        "tier": {"none": "not certified",
                 "relative": "relative collapsing NPI",
                 "full": "collapsing NPI"}[cert.conclusion],
        "certificate": json.loads(emit_certificate(cert)),
    }
    witnesses = [
        {"check": c.name, "detail": c.detail, "witness": c.witness}
        for c in cert.checks if not c.passed
    ]
    return code, _report("certify npi", status, code, detail, witnesses)


def cmd_audit(args) -> tuple[int, dict]:
    doc = parse_complex(_read(args.file))
    L = doc.complex
    budget = ImmersionBudget(
        max_cells=args.max_cells,
        allow_reflections=not args.no_reflections,
        max_configs=args.max_configs,
    )
    if args.what == "npi":
        report, instances = audit_npi(L, budget)
    else:
        K = _resolve_sub(doc, args.sub)
        report, instances = audit_relative(L, K, budget)
    if args.dump_instances:
        args.dump_instances.mkdir(parents=True, exist_ok=True)
        for idx, (X, f) in enumerate(instances):
            text = serialize_complex(f"instance_{idx}", X)
            text += serialize_map(f)
            (args.dump_instances / f"instance_{idx:03d}.2cx").write_text(
                text, encoding="utf-8")
    witnesses = []
    for idx in report.violations:
        X, f = instances[idx]
        witnesses.append({
            "chi_x": report.records[idx].chi_x,
            "chi_y": report.records[idx].chi_y,
            "instance": serialize_complex(f"violation_{idx}", X) + serialize_map(f),
        })
    if report.violations:
        status, code = "fail", EXIT_REFUTED
    elif not report.completed:
        status, code = "inconclusive", EXIT_INCONCLUSIVE
    else:
        status, code = "pass", EXIT_PASS
    detail = {
        "kind": report.kind,
        "instances": report.count,
        "violations": len(report.violations),
        "completed": report.completed,
        "configs_examined": report.configs_examined,
        "records": [
            {"chi_x": r.chi_x, "chi_y": r.chi_y, "cells": list(r.cells)}
            for r in report.records
        ],
    }
    return code, _report(f"audit {args.what}", status, code, detail, witnesses)


def cmd_thin(args) -> tuple[int, dict]:
    x_doc = parse_complex(_read(args.file))
    if args.target:
        l_doc = parse_complex(_read(args.target))
    else:
        l_doc = x_doc
    L = l_doc.complex
    K = l_doc.sub(args.sub)
    omega = _load_angles(args.angles, L)
    if args.map_file:
        f = parse_map(_read(args.map_file), x_doc.complex, L)
    else:
        f = identity_map(L)
    res = thin_immersion(f, K, omega)
    detail = {
        "hollowed_components": res.hollowed_components,
        "boundary_components": res.boundary_components,
        "chi_x": res.chi_x,
        "chi_x_prime": res.chi_x_prime,
        "thinned": serialize_complex("thinned", res.x_prime),
        "formal_cells": sorted(
            c for (c, t) in res.f_prime.cell_targets if t[0] == "formal"
        ),
    }
    return EXIT_PASS, _report("thin", "pass", EXIT_PASS, detail)


def cmd_lot(args) -> tuple[int, dict]:
    doc = parse_lot(_read(args.file))
    g = doc.log
    if args.what == "check":
        flags = reduction_flags(g)
        K = lot_complex(g)
        detail = {
            "is_tree": g.is_tree,
            "boundary_reduced": flags.boundary_reduced,
            "interior_reduced": flags.interior_reduced,
            "compressed": flags.compressed,
            "reduced": flags.reduced,
            "injective": flags.injective,
            "complex_euler_characteristic": euler_characteristic(K),
        }
        ok = flags.reduced and flags.injective and g.is_tree
        status = "pass" if ok else "fail"
        code = EXIT_PASS if ok else EXIT_REFUTED
        return code, _report("lot check", status, code, detail)

    if not args.sub or not args.collapse_vertex:
        raise PreconditionError("lot certify needs --sub and --collapse-vertex")
    indices = doc.sub(args.sub)
    sub_npi = None if args.sub_npi == "auto" else "assume"
    cert = certify_lot(g, indices, args.collapse_vertex, sub_npi=sub_npi)
    status = "pass" if cert.conclusion != "none" else "fail"
    code = EXIT_PASS if cert.conclusion != "none" else EXIT_REFUTED
    detail = {
        "conclusion": cert.conclusion,
        "sub_justification": cert.sub_justification,
        "checks": {c.name: c.passed for c in cert.checks},
        "quotient": cert.quotient_text,
        "assumptions": list(cert.assumptions),
    }
    witnesses = [{"check": c.name, "witness": c.witness}
                 for c in cert.checks if not c.passed]
    return code, _report("lot certify", status, code, detail, witnesses)


def _render_human(report: dict) -> str:
    lines = [f"npikit {report['command']}: {report['status'].upper()}"]
    for key, value in sorted(report["detail"].items()):
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        if isinstance(value, str) and "\n" in value:
            value = json.dumps(value)
        lines.append(f"  {key}: {value}")
    for w in report["witnesses"]:
        lines.append(f"  witness: {json.dumps(w, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    handlers = {
        "parse": cmd_parse,
        "links": cmd_links,
        "curvature": cmd_curvature,
        "check": cmd_check,
        "certify": cmd_certify,
        "audit": cmd_audit,
        "thin": cmd_thin,
        "lot": cmd_lot,
    }
    try:
        code, report = handlers[args.command](args)
    except (ParseError, FileNotFoundError, PreconditionError) as exc:
        report = _report(args.command, "error", EXIT_USAGE, {"error": str(exc)})
        code = EXIT_USAGE
    except NpikitError as exc:
        report = _report(args.command, "error", EXIT_USAGE, {"error": str(exc)})
        code = EXIT_USAGE

    if args.format == "structured":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = _render_human(report)
    sys.stdout.write(text)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
