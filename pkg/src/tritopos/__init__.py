"""Desk-scale engine for toposes built from finite Heyting-valued triposes.

The package builds finite Heyting algebras, the canonical set-indexed
tripos over such an algebra, the category of partial equivalence
relations it induces, resolutions of its objects by assemblies, and the
pseudoequivalence-quotient and Kan-extension machinery on top; every
defining condition is checked exhaustively at small size.
"""
from .report import TOOL_NAME, TOOL_VERSION

__version__ = TOOL_VERSION

__all__ = ["TOOL_NAME", "TOOL_VERSION", "__version__"]
