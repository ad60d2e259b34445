"""Parametric PDE discovery from gridded field data."""

__version__ = "0.1.0"

from .grid import Field, Grid

__all__ = ["Field", "Grid", "__version__"]
