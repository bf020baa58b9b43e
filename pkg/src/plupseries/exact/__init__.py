"""Exact rational arithmetic: polynomials, truncated series, rational functions,
Thiele interpolation, Padé approximants and numerical root finding."""

from .poly import Poly, as_fraction, poly_gcd, squarefree_decomposition, format_poly
from .series import TruncSeries, series_add, series_mul, series_recip, series_derivative
from .ratfn import RationalFn, expand_rational, substitute_affine, rational_from_json, rational_to_json
from .thiele import ThieleFit, thiele_fit, thiele_interpolate
from .pade import PadeApprox, pade
from .roots import ComplexRoot, poly_roots, poly_from_roots
from .linalg import solve_dense, solve_sparse

__all__ = [
    "Poly", "as_fraction", "poly_gcd", "squarefree_decomposition", "format_poly",
    "TruncSeries", "series_add", "series_mul", "series_recip", "series_derivative",
    "RationalFn", "expand_rational", "substitute_affine", "rational_from_json", "rational_to_json",
    "ThieleFit", "thiele_fit", "thiele_interpolate", "PadeApprox", "pade",
    "ComplexRoot", "poly_roots", "poly_from_roots", "solve_dense", "solve_sparse",
]
