"""readkdet: read-k determinantal projections of multivariate polynomials.

Exact constructions, determinant-preserving reductions, field
classification, non-expressibility certificates and bounded exhaustive
witness search, over Q, prime fields and Q(w) with w**2 = w - 1.
"""

from .construct import (
    FieldClassification,
    classify_field_s42,
    perm6_projection,
    s42_witness,
    sym_read_once,
    symmetric_support_matrix,
)
from .errors import ReadKDetError
from .field import (
    EISENSTEIN,
    RATIONALS,
    FieldSpec,
    FieldValue,
    is_prime,
    prime_field,
    solve_unit_quadratic,
    sqrt_neg3,
)
from .poly import (
    Monomial,
    MonomialSet,
    Polynomial,
    elementary_symmetric,
    mon_of,
    parse_polynomial,
    permanent_symbolic,
    ryser_eval,
)
from .search import Certificate, SearchConfig, SearchOutcome, certify_support, search_rod
from .symmat import (
    AffineForm,
    AffineMatrix,
    EqualityProbe,
    SymbolicMatrix,
    Var,
    det_eval,
    equal_det_probabilistic,
    load_matrix_json,
    minmax_rank,
    symbolic_det,
    symbolic_perm,
)
from .transform import (
    ABP,
    abp_to_read_once,
    block_product,
    compress_read_once,
    derivative_minor,
    reduce_to_affine,
    substitute_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "ABP",
    "AffineForm",
    "AffineMatrix",
    "Certificate",
    "EISENSTEIN",
    "EqualityProbe",
    "FieldClassification",
    "FieldSpec",
    "FieldValue",
    "Monomial",
    "MonomialSet",
    "Polynomial",
    "RATIONALS",
    "ReadKDetError",
    "SearchConfig",
    "SearchOutcome",
    "SymbolicMatrix",
    "Var",
    "abp_to_read_once",
    "block_product",
    "certify_support",
    "classify_field_s42",
    "compress_read_once",
    "derivative_minor",
    "det_eval",
    "elementary_symmetric",
    "equal_det_probabilistic",
    "is_prime",
    "load_matrix_json",
    "minmax_rank",
    "mon_of",
    "parse_polynomial",
    "perm6_projection",
    "permanent_symbolic",
    "prime_field",
    "reduce_to_affine",
    "ryser_eval",
    "s42_witness",
    "search_rod",
    "solve_unit_quadratic",
    "sqrt_neg3",
    "substitute_matrix",
    "sym_read_once",
    "symbolic_det",
    "symbolic_perm",
    "symmetric_support_matrix",
]
