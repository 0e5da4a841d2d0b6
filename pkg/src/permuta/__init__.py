"""Permutation and injection constraint models, propagation and search."""

__version__ = "0.1.0"
