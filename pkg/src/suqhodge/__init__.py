"""Hodge theory of the 3D calculus on quantum SU(2)."""

__version__ = "0.1.0"
