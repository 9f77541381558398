"""Finite bicategories, fibrations between them, Cartesian lifts and limit lifting."""
from __future__ import annotations

from .core import Bicategory, Category, CoherenceReport, Verdict, validate_bicategory, validate_category
from .errors import (
    BifibError,
    HypothesisError,
    InconsistencyError,
    PreconditionError,
    SizeLimitError,
    StructuralError,
)
from .functor import LaxFunctor, Modification, OplaxTransformation, validate_functor, validate_transformation

__all__ = [
    "Bicategory", "Category", "CoherenceReport", "Verdict", "validate_bicategory", "validate_category",
    "BifibError", "HypothesisError", "InconsistencyError", "PreconditionError", "SizeLimitError", "StructuralError",
    "LaxFunctor", "Modification", "OplaxTransformation", "validate_functor", "validate_transformation",
]
