"""npikit: 2-complexes, coloring tests, fold-based non-positive-immersion
certification, brute-force immersion audits, and a labeled-oriented-tree
front end."""

from .complexes import (
    LinkGraph,
    Subcomplex,
    TwoComplex,
    boundary_interior,
    essential_part,
    euler_characteristic,
    exponent_heights,
    free_faces,
    link,
    make_complex,
    materialize,
    subcomplex,
)
from .collapses import cap_graph, collapse, is_collapsible
from .maps import (
    CombMap,
    compose,
    fold_to_edge,
    identity_map,
    is_immersion,
    make_map,
    preimage_subcomplex,
    pulled_back_pair,
    validate_map,
)
from .angles import (
    AngleStructure,
    CurvatureReport,
    cell_curvature,
    gauss_bonnet,
    make_angles,
    pullback_angles,
    standard_angles,
    vertex_curvature,
)
from .graphs import (
    Verdict,
    WeightedGraph,
    is_forest,
    is_relative_forest,
    is_relative_forest_oracle,
    is_strong_relative_forest,
    is_strong_relative_forest_quotient,
    make_graph,
    quotient_graph,
    reduced_cycles_bounded,
)
from .coloring import (
    ColoringReport,
    coloring_test,
    coloring_test_oracle,
    link0_graph,
    relative_coloring_test,
    strong_relative_coloring_test,
)
from .formats import ComplexDocument, ParseError, parse_complex, serialize_complex

__version__ = "0.1.0"
