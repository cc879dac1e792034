"""Exact linear algebra for the Steinberg module of F_q^n, its bar and Koszul
complexes, and Tor over the apartment monoid."""

__version__ = "0.1.0"

from .exactla import GF, QQ, CoefficientField, SparseMatrix, rank
from .subspaces import Subspace, canonical_subspace, enumerate_subspaces
from .steinberg import (
    ApartmentSymbol,
    PBWIndex,
    SteinbergElement,
    TooLarge,
    pbw_basis,
    presentation_dim_oracle,
    straighten,
)
from .chains import ChainComplex, assemble, homology_dims
from .barkoszul import bar_homology, build_bar, phi, verify_homotopy
from .tor import TorTable, chain_dim, coinvariants_dim, koszul_tor, ls_l1_degree3, oriented_tor, sharbly_tor
from .buildings import tits_homology, yn_homology
from .oriented import oriented_module

__all__ = [
    "GF",
    "QQ",
    "CoefficientField",
    "SparseMatrix",
    "rank",
    "Subspace",
    "canonical_subspace",
    "enumerate_subspaces",
    "ApartmentSymbol",
    "PBWIndex",
    "SteinbergElement",
    "TooLarge",
    "pbw_basis",
    "presentation_dim_oracle",
    "straighten",
    "ChainComplex",
    "assemble",
    "homology_dims",
    "bar_homology",
    "build_bar",
    "phi",
    "verify_homotopy",
    "TorTable",
    "chain_dim",
    "coinvariants_dim",
    "koszul_tor",
    "ls_l1_degree3",
    "oriented_tor",
    "sharbly_tor",
    "tits_homology",
    "yn_homology",
    "oriented_module",
]
