"""Exact verification toolkit for TSSCPP enumeration and the level-1 qKZ solution."""
from __future__ import annotations

from .exactalg import ExactPoly, PolyMatrix, parse_poly, var
from .linkpat import LinkPattern

__version__ = "0.1.0"

__all__ = ["ExactPoly", "PolyMatrix", "LinkPattern", "parse_poly", "var", "__version__"]
