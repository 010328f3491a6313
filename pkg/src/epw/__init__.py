"""Exact-arithmetic workbench for Lagrangian degeneracy loci of 3-forms.

Everything is computed over small finite fields GF(p^k) with exact linear
algebra; no floating point is used anywhere.
"""

from .field import Field, Fe, build_extension

__all__ = ["Field", "Fe", "build_extension"]
__version__ = "0.1.0"
