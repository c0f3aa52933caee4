"""Conjugate complex polynomials, their symmetric tensor representations,
and eigenvalue/equivalence tools for structured complex tensors."""

from .apps import (
    RadarScenario,
    RankOneResult,
    Scatterer,
    build_radar_objective,
    build_shift_matrix,
    embed_rank_one_as_geig,
    rank_one_als,
    solve_radar,
    steering_vector,
)
from .banach import (
    AscentResult,
    EqualityReport,
    block_coordinate_ascent,
    check_cps_banach,
    check_css_banach,
    check_symmetric_complex_banach,
    hermitian_banach,
    sandwich_check,
)
from .bijection import (
    CpsDecomposition,
    cps_decompose,
    css_project,
    embed_cps_to_css,
    flatten_square,
    g_forward,
    g_inverse,
    is_flattening_psd,
    s_forward,
    s_inverse,
)
from .core import (
    is_cps,
    is_css,
    is_partial_symmetric,
    is_symmetric,
    multilinear_eval,
    outer_product,
    partial_eval,
    partial_symmetrize,
    symmetrize,
    tensor_norm,
)
from .eigen import (
    EigenPair,
    SolverConfig,
    c_eig_residual,
    check_c_g_relation,
    check_q_c_relation,
    solve_c_eig,
    solve_g_eig,
    solve_q_eig,
    sphere_oracle,
)
from .errors import (
    ArgumentError,
    ConjTensorError,
    ConvergenceError,
    DegenerateRecovery,
    DimensionError,
    InternalError,
    ParseError,
    RelationError,
    StructureError,
)
from .forms import (
    ConjugatePolynomial,
    FormClass,
    MonomialKey,
    check_real_valued,
    classify_form,
    conjugate_key,
    eval_poly,
    parse_poly,
    print_poly,
)
from .linalg import hermitian_eig

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "AscentResult",
    "block_coordinate_ascent",
    "build_radar_objective",
    "build_shift_matrix",
    "c_eig_residual",
    "check_c_g_relation",
    "check_cps_banach",
    "check_css_banach",
    "check_q_c_relation",
    "check_real_valued",
    "check_symmetric_complex_banach",
    "classify_form",
    "ConjTensorError",
    "conjugate_key",
    "ConjugatePolynomial",
    "ConvergenceError",
    "cps_decompose",
    "CpsDecomposition",
    "css_project",
    "DegenerateRecovery",
    "DimensionError",
    "EigenPair",
    "embed_cps_to_css",
    "embed_rank_one_as_geig",
    "EqualityReport",
    "eval_poly",
    "flatten_square",
    "FormClass",
    "g_forward",
    "g_inverse",
    "hermitian_banach",
    "hermitian_eig",
    "InternalError",
    "is_cps",
    "is_css",
    "is_flattening_psd",
    "is_partial_symmetric",
    "is_symmetric",
    "MonomialKey",
    "multilinear_eval",
    "outer_product",
    "parse_poly",
    "ParseError",
    "partial_eval",
    "partial_symmetrize",
    "print_poly",
    "RadarScenario",
    "rank_one_als",
    "RankOneResult",
    "RelationError",
    "s_forward",
    "s_inverse",
    "sandwich_check",
    "Scatterer",
    "solve_c_eig",
    "solve_g_eig",
    "solve_q_eig",
    "solve_radar",
    "SolverConfig",
    "sphere_oracle",
    "steering_vector",
    "StructureError",
    "symmetrize",
    "tensor_norm",
]
