"""Exact symbolic engine for graded BV structures of topological sigma models."""

from .grading import GradedVar, koszul_sign, parity
from .symalg import (
    CPoly,
    CoeffSymbol,
    Expr,
    MissingSymbolError,
    MixedContextError,
    SymGroup,
    make_symbol,
)
from .models import (
    Action,
    BfBlock,
    CsBlock,
    FamilyDecl,
    ModelError,
    ModelSpec,
    StructureData,
    ansatz_families,
    build_S0,
    build_S1_generic,
    validate_degree,
)
from .pstructure import PStructure, antibracket, bv_laplacian, check_bv_identities

__all__ = [
    "GradedVar",
    "koszul_sign",
    "parity",
    "CPoly",
    "CoeffSymbol",
    "Expr",
    "MissingSymbolError",
    "MixedContextError",
    "SymGroup",
    "make_symbol",
    "Action",
    "BfBlock",
    "CsBlock",
    "FamilyDecl",
    "ModelError",
    "ModelSpec",
    "StructureData",
    "ansatz_families",
    "build_S0",
    "build_S1_generic",
    "validate_degree",
    "PStructure",
    "antibracket",
    "bv_laplacian",
    "check_bv_identities",
]
