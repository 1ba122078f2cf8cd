"""Exact tools for exterior differential systems.

Structure equations, tableaux and their characters, Cartan's test,
integral elements at a point, torsion-free H-structures, and a small
declarative language with a bundled corpus of worked examples.
"""

from .errors import AnalysisError, DegeneratePoint, EdsError, EvaluationError, ParseError, UnknownIdentifier
from .dsl import load, parse_document, to_dsl
from .structeq import analyze, check_torsion, prolong_structure, solve_for_G
from .tableau import CharacterSeq, FormTableau, cartan_test, prolong
from .point import PointIdeal, flag_characters, ordinary_test
from .hstruct import LieSubalgebra, curvature_kernels, torsion_free_analysis

__version__ = "0.1.0"

__all__ = [
    "AnalysisError", "DegeneratePoint", "EdsError", "EvaluationError", "ParseError", "UnknownIdentifier",
    "load", "parse_document", "to_dsl",
    "analyze", "check_torsion", "prolong_structure", "solve_for_G",
    "CharacterSeq", "FormTableau", "cartan_test", "prolong",
    "PointIdeal", "flag_characters", "ordinary_test",
    "LieSubalgebra", "curvature_kernels", "torsion_free_analysis",
]
