"""Exact verification tools for conditional Ingleton inequalities on four
binary random variables."""

from .ci import CIStatement, CIStructure, ci_structure, holds_exact
from .dist import JointTable, load_table, make_table, marginal, paper_example
from .entropy import LinFunctional, entropy_vector, evaluate, exact_sign, is_polymatroid
from .ingleton import INGLETON, ingleton_functional

__version__ = "0.1.0"

__all__ = [
    "CIStatement",
    "CIStructure",
    "INGLETON",
    "JointTable",
    "LinFunctional",
    "ci_structure",
    "entropy_vector",
    "evaluate",
    "exact_sign",
    "holds_exact",
    "ingleton_functional",
    "is_polymatroid",
    "load_table",
    "make_table",
    "marginal",
    "paper_example",
]
