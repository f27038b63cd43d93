"""Elliptic fibrations on elliptic ruled surfaces, in any characteristic."""

from .classifier import ClassificationInput, ClassificationResult, classify, cross_check, table_lookup
from .errors import RuledFibError

__all__ = [
    "ClassificationInput",
    "ClassificationResult",
    "RuledFibError",
    "classify",
    "cross_check",
    "table_lookup",
]
__version__ = "0.1.0"
