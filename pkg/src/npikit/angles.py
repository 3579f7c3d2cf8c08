"""Integer angle structures, curvature, and the Gauss-Bonnet audit.

An angle structure assigns an integer weight to every corner (cell, word
position) of a complex.  Certification paths only ever use zero/one weights,
but curvature and the Gauss-Bonnet identity hold for arbitrary integers, so
general integers are supported to strengthen the audit.

Curvature:  kappa(v) = 2 - chi(lk(v)) - sum of corner weights at v,
            kappa(d) = sum of corner weights in d - (|bd d| - 2).
The combinatorial Gauss-Bonnet identity
            2 chi(K) = sum_v kappa(v) + sum_d kappa(d)
is asserted exactly (residual zero) on every report.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .complexes import (
    CornerId,
    Subcomplex,
    TwoComplex,
    euler_characteristic,
    link,
    materialize,
)
from .errors import ComplexError, InternalInvariantError, MapError, PreconditionError
from .maps import CombMap, validate_map


@dataclass(frozen=True)
class AngleStructure:
    complex: TwoComplex
    weights: tuple[tuple[CornerId, int], ...]

    def __post_init__(self):
        want = set(all_corners(self.complex))
        got = set(cid for (cid, _) in self.weights)
        if got != want:
            missing = sorted(want - got)
            extra = sorted(got - want)
            raise ComplexError(
                f"angle structure not total: missing {missing[:4]}, extra {extra[:4]}"
            )

    @cached_property
    def by_corner(self) -> dict[CornerId, int]:
        return dict(self.weights)

    def __getitem__(self, cid: CornerId) -> int:
        return self.by_corner[cid]

    def is_zero_one(self) -> bool:
        return all(w in (0, 1) for (_, w) in self.weights)


def all_corners(K: TwoComplex) -> list[CornerId]:
    return [(c, i) for (c, word) in K.cells for i in range(len(word))]


def make_angles(K: TwoComplex, weights: dict[CornerId, int]) -> AngleStructure:
    return AngleStructure(K, tuple(sorted(weights.items())))


def standard_angles(K: TwoComplex) -> AngleStructure:
    """Positive-positive and negative-negative corners get 0, mixed get 1."""
    weights = {}
    for (c, word) in K.cells:
        n = len(word)
        for i in range(n):
            a = word[i][1]  # arrival end sign is -a
            b = word[(i + 1) % n][1]  # departure end sign is b
            weights[(c, i)] = 0 if -a == b else 1
    return make_angles(K, weights)


def zero_angles(K: TwoComplex) -> AngleStructure:
    return make_angles(K, {cid: 0 for cid in all_corners(K)})


def vertex_curvature(K: TwoComplex, omega: AngleStructure, v: str) -> int:
    lk = link(K, v)
    total = sum(omega[cid] for cid in lk.corner_ids())
    return 2 - lk.euler_characteristic - total


def cell_curvature(K: TwoComplex, omega: AngleStructure, c: str) -> int:
    word = K.cell_word(c)
    total = sum(omega[(c, i)] for i in range(len(word)))
    return total - (len(word) - 2)


@dataclass(frozen=True)
class CurvatureReport:
    vertex_curvatures: tuple[tuple[str, int], ...]
    cell_curvatures: tuple[tuple[str, int], ...]
    euler_characteristic: int
    residual: int

    def __post_init__(self):
        if self.residual != 0:
            raise InternalInvariantError(
                f"Gauss-Bonnet residual {self.residual} != 0"
            )


def gauss_bonnet(K: TwoComplex, omega: AngleStructure) -> CurvatureReport:
    """Exact combinatorial Gauss-Bonnet: 2*chi = sum kappa(v) + sum kappa(d)."""
    if omega.complex != K:
        raise PreconditionError("angle structure belongs to a different complex")
    vk = tuple((v, vertex_curvature(K, omega, v)) for v in sorted(K.vertices))
    ck = tuple((c, cell_curvature(K, omega, c)) for (c, _) in sorted(K.cells))
    chi = euler_characteristic(K)
    residual = 2 * chi - sum(k for (_, k) in vk) - sum(k for (_, k) in ck)
    return CurvatureReport(vk, ck, chi, residual)


def pullback_angles(f: CombMap, omega: AngleStructure) -> AngleStructure:
    """Each source corner receives the weight of its image corner."""
    if omega.complex != f.target:
        raise PreconditionError("angle structure does not live on the map's target")
    bad = validate_map(f)
    if bad:
        raise MapError(f"cannot pull back along an invalid map: {bad[0]}")
    weights = {}
    for (c, word) in f.source.cells:
        for i in range(len(word)):
            weights[(c, i)] = omega[f.corner_image(c, i)]
    return make_angles(f.source, weights)


def restrict_angles(omega: AngleStructure, S: Subcomplex) -> AngleStructure:
    """Angles on a materialized subcomplex (corner ids are preserved)."""
    sub = materialize(S)
    return make_angles(sub, {cid: omega[cid] for cid in all_corners(sub)})


# --- angle file format ----------------------------------------------------
#
#   default standard | default 0
#   angle <cell-id> <position-index> <integer>
#
# Positions are 0-based within the attaching word; corners not listed take
# the default.  Without a default line the listing must be total.

def parse_angle_file(text: str, K: TwoComplex) -> AngleStructure:
    default = None
    explicit: dict[CornerId, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "default":
            if len(parts) != 2 or parts[1] not in ("standard", "0"):
                raise ComplexError(f"line {lineno}: default must be 'standard' or '0'")
            default = parts[1]
        elif parts[0] == "angle":
            if len(parts) != 4:
                raise ComplexError(f"line {lineno}: expected 'angle <cell> <pos> <int>'")
            cell, pos_s, val_s = parts[1], parts[2], parts[3]
            if cell not in K.cell_ids:
                raise ComplexError(f"line {lineno}: unknown cell {cell!r}")
            try:
                pos, val = int(pos_s), int(val_s)
            except ValueError:
                raise ComplexError(f"line {lineno}: bad integer") from None
            if not 0 <= pos < len(K.cell_word(cell)):
                raise ComplexError(f"line {lineno}: position {pos} out of range")
            explicit[(cell, pos)] = val
        else:
            raise ComplexError(f"line {lineno}: unknown directive {parts[0]!r}")
    if default == "standard":
        base = dict(standard_angles(K).weights)
    elif default == "0":
        base = {cid: 0 for cid in all_corners(K)}
    else:
        base = {}
    base.update(explicit)
    missing = set(all_corners(K)) - set(base)
    if missing:
        raise ComplexError(
            f"no default given and corners are missing, e.g. {sorted(missing)[0]}"
        )
    return make_angles(K, base)


def serialize_angles(omega: AngleStructure) -> str:
    lines = ["default 0"]
    for (cid, w) in sorted(omega.weights):
        if w != 0:
            lines.append(f"angle {cid[0]} {cid[1]} {w}")
    return "\n".join(lines) + "\n"
