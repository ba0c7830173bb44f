"""Evaluation codes on quadric surfaces and Segre varieties, their twists,
and the extended BCH codes they are equivalent to.
"""

from .analysis import BudgetExceeded, ParamReport, min_distance_exhaustive
from .codes import LinearCode, RangeError
from .finite_field import Field, FieldElement, make_field, tower
from .forms import Form, parse_form
from .geometry import ProjectivePoint
from .linalg import Matrix

__all__ = [
    "BudgetExceeded", "Field", "FieldElement", "Form", "LinearCode", "Matrix",
    "ParamReport", "ProjectivePoint", "RangeError", "make_field", "min_distance_exhaustive",
    "parse_form", "tower",
]
__version__ = "0.1.0"
