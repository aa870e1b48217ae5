"""Exact tautological calculus on moduli of stable curves."""

__version__ = "0.1.0"

from .poly import Poly

__all__ = ["Poly", "__version__"]
