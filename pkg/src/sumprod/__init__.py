"""Exact-arithmetic laboratory for sum-product machinery over the Gaussian rationals."""

from .gaussian import GaussianRational, gr
from .sets import (
    FiniteComplexSet,
    difference_set,
    generate,
    product_set,
    ratio_set,
    representation_counts,
    sector_check,
    sumset,
)

__version__ = "0.1.0"

__all__ = [
    "GaussianRational",
    "gr",
    "FiniteComplexSet",
    "sumset",
    "difference_set",
    "product_set",
    "ratio_set",
    "representation_counts",
    "sector_check",
    "generate",
]
