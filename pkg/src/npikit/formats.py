"""Text formats: complex documents, map blocks, and serializers.

Complex format (UTF-8, line oriented, ``#`` starts a comment)::

    complex <name>
    vertex <id>
    edge <id> <src-vertex> <dst-vertex>
    cell <id> <tok> <tok> ...     # tok = <edge-id> or -<edge-id>
    sub <name> cells <cell-id>... [edges <edge-id>...] [vertices <vertex-id>...]

Ids are alphanumeric-plus-underscore, case-sensitive.  Declaration order is
free; forward references are resolved after the whole document is read.
``sub`` blocks become face-closed subcomplexes (faces forced by the listed
cells are added automatically).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .complexes import Subcomplex, TwoComplex, Word, subcomplex
from .errors import ComplexError, NpikitError
from .maps import CombMap, make_map

_ID = re.compile(r"^[A-Za-z0-9_]+$")


class ParseError(NpikitError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class ComplexDocument:
    name: str
    complex: TwoComplex
    subcomplexes: tuple[tuple[str, Subcomplex], ...]

    def sub(self, name: str) -> Subcomplex:
        for (n, s) in self.subcomplexes:
            if n == name:
                return s
        raise ComplexError(f"no subcomplex named {name!r}")

    def sub_names(self) -> list[str]:
        return [n for (n, _) in self.subcomplexes]


def _check_id(lineno: int, token: str, what: str) -> str:
    if not _ID.match(token):
        raise ParseError(lineno, f"bad {what} id {token!r}")
    return token


def parse_complex(text: str) -> ComplexDocument:
    """Parse a complex document; errors carry the offending line number."""
    name = None
    vertices: list[tuple[int, str]] = []
    edges: list[tuple[int, str, str, str]] = []
    cells: list[tuple[int, str, Word]] = []
    subs: list[tuple[int, str, dict]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "complex":
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'complex <name>'")
            name = _check_id(lineno, parts[1], "complex")
        elif kind == "vertex":
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'vertex <id>'")
            vertices.append((lineno, _check_id(lineno, parts[1], "vertex")))
        elif kind == "edge":
            if len(parts) != 4:
                raise ParseError(lineno, "expected 'edge <id> <src> <dst>'")
            edges.append((lineno, _check_id(lineno, parts[1], "edge"),
                          parts[2], parts[3]))
        elif kind == "cell":
            if len(parts) < 3:
                raise ParseError(lineno, "expected 'cell <id> <tok> ...'")
            word = []
            for tok in parts[2:]:
                if tok.startswith("-"):
                    word.append((tok[1:], -1))
                else:
                    word.append((tok, 1))
                _check_id(lineno, word[-1][0], "edge")
            cells.append((lineno, _check_id(lineno, parts[1], "cell"), tuple(word)))
        elif kind == "sub":
            if len(parts) < 3:
                raise ParseError(lineno, "expected 'sub <name> cells ...'")
            sub_name = _check_id(lineno, parts[1], "subcomplex")
            lists: dict[str, list[str]] = {"cells": [], "edges": [], "vertices": []}
            current = None
            for tok in parts[2:]:
                if tok in lists:
                    current = tok
                elif current is None:
                    raise ParseError(lineno, f"expected 'cells', got {tok!r}")
                else:
                    lists[current].append(tok)
            subs.append((lineno, sub_name, lists))
        else:
            raise ParseError(lineno, f"unknown directive {kind!r}")

    if name is None:
        name = "unnamed"
    vertex_ids = [v for (_, v) in vertices]
    edge_ids = {e for (_, e, _, _) in edges}
    for (lineno, e, src, dst) in edges:
        if src not in set(vertex_ids):
            raise ParseError(lineno, f"unknown vertex {src!r}")
        if dst not in set(vertex_ids):
            raise ParseError(lineno, f"unknown vertex {dst!r}")
    for (lineno, c, word) in cells:
        for (e, _) in word:
            if e not in edge_ids:
                raise ParseError(lineno, f"unknown edge {e!r}")
    try:
        K = TwoComplex(
            vertices=tuple(vertex_ids),
            edges=tuple((e, s, d) for (_, e, s, d) in edges),
            cells=tuple((c, w) for (_, c, w) in cells),
        )
    except ComplexError as exc:
        lineno = _guilty_line(str(exc), vertices, edges, cells)
        raise ParseError(lineno, str(exc)) from None

    named_subs = []
    for (lineno, sub_name, lists) in subs:
        for c in lists["cells"]:
            if c not in K.cell_ids:
                raise ParseError(lineno, f"unknown cell {c!r}")
        for e in lists["edges"]:
            if e not in K.edge_ids:
                raise ParseError(lineno, f"unknown edge {e!r}")
        for v in lists["vertices"]:
            if v not in K.vertex_ids:
                raise ParseError(lineno, f"unknown vertex {v!r}")
        named_subs.append((sub_name, subcomplex(K, vertices=lists["vertices"],
                                                edges=lists["edges"],
                                                cells=lists["cells"])))
    return ComplexDocument(name=name, complex=K, subcomplexes=tuple(named_subs))


def _guilty_line(message: str, vertices, edges, cells) -> int:
    """Best-effort line attribution for validation errors."""
    for (lineno, c, _) in cells:
        if f"{c!r}" in message:
            return lineno
    for (lineno, e, _, _) in edges:
        if f"{e!r}" in message:
            return lineno
    for (lineno, v) in vertices:
        if f"{v!r}" in message:
            return lineno
    return 0


def serialize_complex(doc_name: str, K: TwoComplex, subs=()) -> str:
    lines = [f"complex {doc_name}"]
    for v in K.vertices:
        lines.append(f"vertex {v}")
    for (e, s, d) in K.edges:
        lines.append(f"edge {e} {s} {d}")
    for (c, word) in K.cells:
        toks = " ".join(e if sgn > 0 else "-" + e for (e, sgn) in word)
        lines.append(f"cell {c} {toks}")
    for (n, S) in subs:
        lines.append(f"sub {n} cells " + " ".join(sorted(S.cells))
                     + ((" edges " + " ".join(sorted(S.edges))) if S.edges else "")
                     + ((" vertices " + " ".join(sorted(S.vertices))) if S.vertices else ""))
    return "\n".join(lines) + "\n"


# --- map blocks -------------------------------------------------------------
#
#   map
#   vertex <src> -> <dst>
#   edge <src> -> <dst>
#   cell <src> -> <dst> rot <r> [rev]

def serialize_map(f: CombMap) -> str:
    lines = ["map"]
    for (v, img) in f.vertex_map:
        lines.append(f"vertex {v} -> {img}")
    for (e, img) in f.edge_map:
        lines.append(f"edge {e} -> {img}")
    for (c, img) in f.cell_map:
        if img is None:
            lines.append(f"cell {c} -> folded")
        else:
            tcell, r, refl = img
            lines.append(f"cell {c} -> {tcell} rot {r}" + (" rev" if refl else ""))
    return "\n".join(lines) + "\n"


def parse_map(text: str, source: TwoComplex, target: TwoComplex) -> CombMap:
    vmap: dict[str, str] = {}
    emap: dict[str, str] = {}
    cmap: dict[str, tuple | None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line == "map":
            continue
        parts = line.split()
        if len(parts) < 4 or parts[2] != "->":
            raise ParseError(lineno, "expected '<sort> <src> -> <dst> ...'")
        kind, src = parts[0], parts[1]
        if kind == "vertex":
            vmap[src] = parts[3]
        elif kind == "edge":
            emap[src] = parts[3]
        elif kind == "cell":
            if parts[3] == "folded":
                cmap[src] = None
            else:
                if len(parts) < 6 or parts[4] != "rot":
                    raise ParseError(lineno, "expected 'cell <c> -> <d> rot <r> [rev]'")
                refl = len(parts) > 6 and parts[6] == "rev"
                try:
                    rot = int(parts[5])
                except ValueError:
                    raise ParseError(lineno, "rotation must be an integer") from None
                cmap[src] = (parts[3], rot, refl)
        else:
            raise ParseError(lineno, f"unknown sort {kind!r}")
    return make_map(source, target, vmap, emap, cmap)
