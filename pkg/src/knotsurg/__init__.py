"""Knot surgery algebra toolkit: type-D modules over the surgery algebra,
box tensor products with the solid torus, and F[U]-homology of the result."""

from .coeff import ChiralWindow, Policy, Series, UAdic
from .algebra import Elem, alg_mul, parse_elem
from .modules import Generator, TypeDModule, ValidationFailed, reduce, tensor, validate
from .zoo import PRESETS, make_dinfty, make_dn, phi_bimodule, preset_knot
from .surgery import assign_gradings, d_invariants, glue, knot_surgery, link_surgery
from .homology import BACKEND, homology
from .interchange import ParseError, emit, load, parse

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChiralWindow", "Elem", "Generator", "PRESETS", "ParseError", "Policy",
    "Series", "TypeDModule", "UAdic", "ValidationFailed", "alg_mul", "assign_gradings",
    "d_invariants", "emit", "glue", "homology", "knot_surgery", "link_surgery", "load",
    "make_dinfty", "make_dn", "parse", "parse_elem", "phi_bimodule", "preset_knot",
    "reduce", "tensor", "validate",
]
