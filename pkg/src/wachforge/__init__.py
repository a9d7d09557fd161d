"""Exact p-adic construction and verification of rank-two crystalline families."""
from .kernels import BACKEND
from .padic import GlobalContext, NoSolution, OElement, PrecisionError, make_context, valuation

__all__ = ["BACKEND", "GlobalContext", "NoSolution", "OElement", "PrecisionError",
           "make_context", "valuation"]
__version__ = "0.1.0"
