"""Certified dominant asymptotics for diagonals of rational functions.

The package computes, with certified error bounds, the dominant term of the
asymptotic expansion of the diagonal coefficient sequence of a multivariate
rational function with integer coefficients.
"""

__version__ = "0.1.0"

from .polycore import MPoly, RatFun, UPoly, ParseError, parse_mpoly, parse_ratfun

__all__ = [
    "MPoly",
    "UPoly",
    "RatFun",
    "ParseError",
    "parse_mpoly",
    "parse_ratfun",
    "__version__",
]
