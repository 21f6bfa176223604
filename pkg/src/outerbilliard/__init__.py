"""Exact algebra and numerical dynamics for algebraically integrable outer billiards."""

from .polycore import Poly, parse_poly, homogenize, dehomogenize, exact_divide, resultant
from .roots import complex_roots

__all__ = [
    "Poly",
    "parse_poly",
    "homogenize",
    "dehomogenize",
    "exact_divide",
    "resultant",
    "complex_roots",
]

__version__ = "0.1.0"
