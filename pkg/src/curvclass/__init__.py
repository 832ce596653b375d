"""curvclass: symbolic curvature calculus and structure classification.

From a coordinate metric, compute the connection and every standard
curvature tensor exactly, then decide which curvature-restricted geometric
structures hold (recurrence conditions and their generalizations, weak and
pseudo symmetries, semisymmetry, Einstein-type decompositions,
compatibility spaces), each backed by a symbolic certificate.
"""

__version__ = "0.1.0"

from .classifiers import (
    ClassificationReport,
    StructureVerdict,
    STRUCTURE_NAMES,
    classify_all,
    compatible_tensor_space,
    compatible_vector_check,
    detect_chaki_pseudosymmetry,
    detect_linear_recurrence,
    detect_proportional,
    detect_weak_symmetry,
    run_structure,
)
from .context import Assumption, Context, CurvclassError
from .corpus import BUILTIN_NAMES, builtin_metric, load_metric_file, render_metric_file
from .equality import EqualityConfig, EqualityVerdict, eval_numeric, is_zero
from .expr import Expr, ONE, ZERO
from .linalg import ExprMatrix, LinearSolution, invert_matrix, null_space, solve_linear
from .parser import ParseError, parse_expr
from .tensors import (
    ChristoffelSymbols,
    Geometry,
    MetricSpec,
    TensorField,
    christoffel,
    covariant_derivative,
    curvature_action,
    derived_tensor,
    kulkarni_nomizu,
    ricci,
    riemann,
    scalar_curvature,
    signature_at,
    tachibana,
)

__all__ = [
    "Assumption",
    "BUILTIN_NAMES",
    "ChristoffelSymbols",
    "ClassificationReport",
    "Context",
    "CurvclassError",
    "EqualityConfig",
    "EqualityVerdict",
    "Expr",
    "ExprMatrix",
    "Geometry",
    "LinearSolution",
    "MetricSpec",
    "ONE",
    "ParseError",
    "STRUCTURE_NAMES",
    "StructureVerdict",
    "TensorField",
    "ZERO",
    "builtin_metric",
    "christoffel",
    "classify_all",
    "compatible_tensor_space",
    "compatible_vector_check",
    "covariant_derivative",
    "curvature_action",
    "derived_tensor",
    "detect_chaki_pseudosymmetry",
    "detect_linear_recurrence",
    "detect_proportional",
    "detect_weak_symmetry",
    "eval_numeric",
    "invert_matrix",
    "is_zero",
    "kulkarni_nomizu",
    "load_metric_file",
    "null_space",
    "parse_expr",
    "render_metric_file",
    "ricci",
    "riemann",
    "run_structure",
    "scalar_curvature",
    "signature_at",
    "solve_linear",
    "tachibana",
]
