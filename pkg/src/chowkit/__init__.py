"""Exact graded-ring computations: polynomials, Groebner bases, Chow ring presentations."""

__version__ = "0.1.0"
