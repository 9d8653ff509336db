"""Numerical laboratory for Dirac operators with matrix potentials."""

from .clifford import CliffordRep, build_clifford, check_relations, dirac_symbol, invert_symbol
from .fields import (
    DiracConfig,
    GridSpec,
    MatrixPotential,
    SpinorField,
    apply_dirac,
    manufacture_solution,
)

__version__ = "0.1.0"

__all__ = [
    "CliffordRep",
    "DiracConfig",
    "GridSpec",
    "MatrixPotential",
    "SpinorField",
    "apply_dirac",
    "build_clifford",
    "check_relations",
    "dirac_symbol",
    "invert_symbol",
    "manufacture_solution",
]
