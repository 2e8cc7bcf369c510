"""Exact symbolic computation for multiplicatively closed subsets of
Birkhoff strata of the formal-Laurent-series Grassmannian."""

__version__ = "0.1.0"
