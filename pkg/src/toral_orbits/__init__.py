"""Exact orbit structure of integer matrices acting on the lattices (Z/nZ)^d."""

from .catmap import ARNOLD, FIBONACCI, catmap_closed_form, catmap_constants
from .census import (
    CyclePolynomial,
    OrbitCensus,
    enumerate_functional_graph,
    fixed_point_count,
    orbit_counts,
    zeta_polynomial,
)
from .errors import (
    CapExceededError,
    DimensionError,
    InconsistencyError,
    MatrixParseError,
    ModulusMismatchError,
    NotInvertibleError,
    PlateauError,
    PreconditionError,
    ToralError,
)
from .numtheory import crt_combine, crt_split, euler_phi, p_adic_valuation
from .order import (
    CharPolyCoeffs,
    matrix_order,
    mgcd,
    order_lift_profile,
    order_via_mgcd,
    power_coefficients,
    recursion_values,
    sequence_period,
)
from .pretail import (
    block_decompose,
    kernel_chain,
    minimal_poly_split,
    nilpotent_jordan_profile,
    periodic_decomposition,
    pretail_tree,
    uniform_depth_check,
)
from .ring import (
    LatticeSpec,
    ResidueMatrix,
    SmithProfile,
    gl_order,
    kernel_size,
    parse_matrix,
    reduce,
    smith_normal_form,
)
from .symmetry import (
    build_reversor,
    classify_gl2_fp,
    conjugate_mod_n,
    primitive_root_matrix,
    reversible_mod_n,
    scalar_cyclic_split,
    symmetry_group,
)

__version__ = "0.1.0"

__all__ = [
    "ARNOLD",
    "CapExceededError",
    "CharPolyCoeffs",
    "CyclePolynomial",
    "DimensionError",
    "FIBONACCI",
    "InconsistencyError",
    "LatticeSpec",
    "MatrixParseError",
    "ModulusMismatchError",
    "NotInvertibleError",
    "OrbitCensus",
    "PlateauError",
    "PreconditionError",
    "ResidueMatrix",
    "SmithProfile",
    "ToralError",
    "block_decompose",
    "build_reversor",
    "catmap_closed_form",
    "catmap_constants",
    "classify_gl2_fp",
    "conjugate_mod_n",
    "crt_combine",
    "crt_split",
    "enumerate_functional_graph",
    "euler_phi",
    "fixed_point_count",
    "gl_order",
    "kernel_chain",
    "kernel_size",
    "matrix_order",
    "mgcd",
    "minimal_poly_split",
    "nilpotent_jordan_profile",
    "orbit_counts",
    "order_lift_profile",
    "order_via_mgcd",
    "p_adic_valuation",
    "parse_matrix",
    "periodic_decomposition",
    "power_coefficients",
    "pretail_tree",
    "primitive_root_matrix",
    "recursion_values",
    "reduce",
    "reversible_mod_n",
    "scalar_cyclic_split",
    "sequence_period",
    "smith_normal_form",
    "symmetry_group",
    "uniform_depth_check",
    "zeta_polynomial",
]
