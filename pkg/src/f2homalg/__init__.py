"""Exact F₂ homological algebra: Steenrod resolutions, cobar complexes and spectral-sequence bookkeeping."""

__version__ = "0.1.0"
