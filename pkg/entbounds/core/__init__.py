"""
entbounds core - estimators, bounds, designs and relations

figures, suite and cli are imported by path; they depend on
entbounds.config, which itself imports from this package.
"""

from .bounds import (
    IndexVector,
    Method,
    ProbabilityVector,
    TwoSidedBound,
    prop1_bounds,
    prop1_chebyshev,
    prop1_taylor,
    shannon_entropy,
    upsilon_root,
)
from .coefficients import Family, get_coefficients
from .designs import (
    MomentVector,
    QuantumDesign,
    QuantumState,
    builtin_design,
    verify_design,
)
from .errors import EntropyBoundsError, ErrorCategory
from .relations import (
    RelationResult,
    prop2_bounds,
    pure_state_lower_bounds,
    steering_bounds,
    von_neumann_bounds,
)

__all__ = [
    "IndexVector",
    "Method",
    "ProbabilityVector",
    "TwoSidedBound",
    "prop1_bounds",
    "prop1_chebyshev",
    "prop1_taylor",
    "shannon_entropy",
    "upsilon_root",
    "Family",
    "get_coefficients",
    "MomentVector",
    "QuantumDesign",
    "QuantumState",
    "builtin_design",
    "verify_design",
    "EntropyBoundsError",
    "ErrorCategory",
    "RelationResult",
    "prop2_bounds",
    "pure_state_lower_bounds",
    "steering_bounds",
    "von_neumann_bounds",
]
