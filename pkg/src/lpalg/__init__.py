"""Numerical companion for unital operator algebras on l^p_n.

Norm estimation for n x n matrices acting on l^p, element classification
(hermitian, real positive, isometric, bicontractive), fractional powers and
support idempotents, state-vanishing suites and a gallery of worked examples.
"""

from .core import (
    BranchCutError,
    LpError,
    PExponent,
    duality_map,
    identity,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    principal_matrix_function,
    save_matrix,
    vector_p_norm,
)
from .elements import ElementReport, InconsistencyError, classify, is_hermitian, is_invertible_isometry, is_real_positive
from .pnorm import NormEstimate, make_oracle, pnorm, pnorm_bracket, pnorm_oracle, pnorm_power, quotient_seminorm, unitization_norm
from .transforms import cayley, f_transform, power_accretive, power_series, support_idempotent

__all__ = [
    "BranchCutError",
    "ElementReport",
    "InconsistencyError",
    "LpError",
    "NormEstimate",
    "PExponent",
    "cayley",
    "classify",
    "duality_map",
    "f_transform",
    "identity",
    "is_hermitian",
    "is_invertible_isometry",
    "is_real_positive",
    "load_matrix",
    "make_oracle",
    "matrix_from_json",
    "matrix_to_json",
    "pnorm",
    "pnorm_bracket",
    "pnorm_oracle",
    "pnorm_power",
    "power_accretive",
    "power_series",
    "principal_matrix_function",
    "quotient_seminorm",
    "save_matrix",
    "support_idempotent",
    "unitization_norm",
    "vector_p_norm",
]
