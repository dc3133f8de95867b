"""Numerical laboratory for Dixmier traces of powers of Hankel operators."""

from ._backend import BACKEND
from .symbols import FourierSymbol, evaluate, lacunary, monomial, second_derivative

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FourierSymbol",
    "evaluate",
    "lacunary",
    "monomial",
    "second_derivative",
    "__version__",
]
