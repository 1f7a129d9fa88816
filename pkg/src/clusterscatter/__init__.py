"""Exact symbolic computation for generalized cluster algebras and their
scattering diagrams: seed and Y-seed mutation, c- and g-vector recursions,
rank-2 order-by-order scattering completion, mutation invariance, cluster
chamber walls, broken lines, and theta functions.
"""

__version__ = "0.1.0"

from .semifield import CoeffLattice, TropElement, trop_add, p_plus, p_minus, evaluate
from .cluster_core import (
    FixedData,
    Seed,
    YSeed,
    CMatrix,
    GVectorFrame,
    RationalFunction,
    TropMap,
    initial_seed,
    seed_mutate,
    matrix_mutate,
    pattern_walk,
    explore_pattern,
    seeds_equal,
    initial_c_matrix,
    c_matrix_mutate,
    c_matrix_of,
    initial_g_frame,
    g_frame_mutate,
    initial_y_seed,
    y_seed_mutate,
    x_function,
    f_function,
    separation_evaluate,
    a_mutation_pullback,
    x_mutation_pullback,
    chart_variables,
    chart_y_variables,
    seed_to_json,
    seed_from_json,
)

from .scattering import (
    ConsistencyReport,
    PathSpec,
    PositivityError,
    ScatteringDiagram,
    Wall,
    build_initial,
    canonical_form,
    check_consistency,
    cluster_chamber_walls,
    complete_rank2,
    diagram_from_json,
    diagram_to_json,
    diagram_truncate,
    diagrams_equivalent,
    ord_specialization_scalars,
    path_ordered_product,
    render_svg,
    specialize_diagram,
    tk_invariance_check,
    tk_transform,
    wall_label,
)
from .theta import (
    BrokenLine,
    GenericityError,
    enumerate_broken_lines,
    theta,
    theta_via_transport,
)

__all__ = [
    "CoeffLattice",
    "TropElement",
    "trop_add",
    "p_plus",
    "p_minus",
    "evaluate",
    "FixedData",
    "Seed",
    "YSeed",
    "CMatrix",
    "GVectorFrame",
    "RationalFunction",
    "TropMap",
    "initial_seed",
    "seed_mutate",
    "matrix_mutate",
    "pattern_walk",
    "explore_pattern",
    "seeds_equal",
    "initial_c_matrix",
    "c_matrix_mutate",
    "c_matrix_of",
    "initial_g_frame",
    "g_frame_mutate",
    "initial_y_seed",
    "y_seed_mutate",
    "x_function",
    "f_function",
    "separation_evaluate",
    "a_mutation_pullback",
    "x_mutation_pullback",
    "chart_variables",
    "chart_y_variables",
    "seed_to_json",
    "seed_from_json",
    "ConsistencyReport",
    "PathSpec",
    "PositivityError",
    "ScatteringDiagram",
    "Wall",
    "build_initial",
    "canonical_form",
    "check_consistency",
    "cluster_chamber_walls",
    "complete_rank2",
    "diagram_from_json",
    "diagram_to_json",
    "diagram_truncate",
    "diagrams_equivalent",
    "ord_specialization_scalars",
    "path_ordered_product",
    "render_svg",
    "specialize_diagram",
    "tk_invariance_check",
    "tk_transform",
    "wall_label",
    "BrokenLine",
    "GenericityError",
    "enumerate_broken_lines",
    "theta",
    "theta_via_transport",
]
