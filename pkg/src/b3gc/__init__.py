"""Numerical toolkit for B3-generalized complex structures on 3-manifolds."""

__version__ = "0.1.0"
