"""Exact integer polynomials, certified intervals and root isolation."""

from .interval import ComplexBox, RealInterval, interval_elementary, round_to_integer
from .poly import IntPolynomial, poly_discriminant, poly_resultant, sturm_real_root_count
from .roots import isolate_roots

__all__ = [
    "ComplexBox",
    "IntPolynomial",
    "RealInterval",
    "interval_elementary",
    "isolate_roots",
    "poly_discriminant",
    "poly_resultant",
    "round_to_integer",
    "sturm_real_root_count",
]
