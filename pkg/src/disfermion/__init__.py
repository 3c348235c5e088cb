"""Discrete symplectic fermions on double dimers.

Dimer covers and Kasteleyn couplings, Grassmann integrals, lattice Green's
functions, discrete monomials, local fields modulo null fields, and the
Virasoro modes acting on them.
"""
from .lattice import Domain, centered_square, rect_contour
from .dimers import DimerGraph, induce
from .fields import LocalField, parse_field, is_null
from .monomials import MonomialFamily, build_family, family
from .virasoro import CENTRAL_CHARGE, apply_virasoro

__version__ = "0.1.0"
