"""Exact computations with 2-nondegenerate CR model hypersurfaces."""

__version__ = "0.1.0"
