from .bicategory import Bicategory, locally_discrete, product_bicategory, strict_bicategory, validate_bicategory
from .category import Category, Functor1, validate_category, validate_functor_1cat
from .classical import (
    free_fibration_1cat,
    is_cartesian_morphism_1cat,
    is_equivalence_1cat,
    is_grothendieck_fibration_1cat,
    is_rari_universal_1cat,
    rari_of_1cat,
)
from .report import Bounds, CoherenceReport, Verdict, Violation

__all__ = [
    "Bicategory", "locally_discrete", "product_bicategory", "strict_bicategory", "validate_bicategory",
    "Category", "Functor1", "validate_category", "validate_functor_1cat",
    "free_fibration_1cat", "is_cartesian_morphism_1cat", "is_equivalence_1cat",
    "is_grothendieck_fibration_1cat", "is_rari_universal_1cat", "rari_of_1cat",
    "Bounds", "CoherenceReport", "Verdict", "Violation",
]
