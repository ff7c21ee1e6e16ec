"""Deformed generalized Cartan matrices and their t-adic inverses."""

from .cartan import CartanError, Gcm, deformed_cartan, kp_compare, kp_matrix, validate_and_derive
from .gamma import GammaMonomial, LaurentPoly, TruncatedSeries, apply_phi, q_integer, specialize
from .braid import (
    InverseResult,
    PeriodicWord,
    extract_longest_monomial,
    invert_bipartite,
    invert_coxeter,
    invert_series,
    invert_word,
)

__version__ = "0.1.0"

__all__ = [
    "CartanError", "GammaMonomial", "Gcm", "InverseResult", "LaurentPoly", "PeriodicWord",
    "TruncatedSeries", "apply_phi", "deformed_cartan", "extract_longest_monomial",
    "invert_bipartite", "invert_coxeter", "invert_series", "invert_word", "kp_compare",
    "kp_matrix", "q_integer", "specialize", "validate_and_derive",
]
