"""Exact lattice and class-group computations over Z_p[C_p ⋊ C_r]."""

from .chainring import PrecisionError, RingCtx
from .groups import GroupModel, PairDI, Subgroup, make_g, make_gamma
from .lattices import ClassVector, GammaParams, LatticeRep, PeClassVector, fingerprint, omega_vec, phi
from .modules import LambdaModule

__all__ = [
    "ClassVector",
    "GammaParams",
    "GroupModel",
    "LambdaModule",
    "LatticeRep",
    "PairDI",
    "PeClassVector",
    "PrecisionError",
    "RingCtx",
    "Subgroup",
    "fingerprint",
    "make_g",
    "make_gamma",
    "omega_vec",
    "phi",
]
