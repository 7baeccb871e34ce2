"""Filtered Floer-type complexes over F_2((q)): barcodes, Floer graphs,
equivariant squaring and synthetic verification."""

from .complex import (
    Chain,
    FilteredComplex,
    GlobalParams,
    Orbit,
    action_of_chain,
    validate,
)
from .equivariant import EquivariantComplex, evaluate_h1, split_by_grading, validate_equivariant
from .persistence import barcode, beta, beta_min, beta_min_entry_oracle, singular_decomposition
from .scalar import NovikovScalar, parse_scalar

__all__ = [
    "Chain",
    "EquivariantComplex",
    "FilteredComplex",
    "GlobalParams",
    "NovikovScalar",
    "Orbit",
    "action_of_chain",
    "barcode",
    "beta",
    "beta_min",
    "beta_min_entry_oracle",
    "evaluate_h1",
    "parse_scalar",
    "singular_decomposition",
    "split_by_grading",
    "validate",
    "validate_equivariant",
]

__version__ = "0.1.0"
