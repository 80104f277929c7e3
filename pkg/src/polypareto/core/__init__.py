"""
Core analyses for polypareto.

This package holds the polynomial substrate, the Rabier function, the
tangency-value estimator, the sublevel probes, the Newton-polytope checks,
Pareto search and existence verdicts, and the analysis controller.
"""

from .analyzer import ProblemAnalyzer
from .pareto import candidate_pareto_values, existence_verdict, find_pareto_points, nondominated_filter
from .polynomial import ParseError, PolyMap, Polynomial, parse_poly_map
from .rabier import rabier_nu
from .tangency import estimate_tangency_values

__all__ = [
    "ProblemAnalyzer",
    "ParseError",
    "PolyMap",
    "Polynomial",
    "parse_poly_map",
    "rabier_nu",
    "estimate_tangency_values",
    "find_pareto_points",
    "candidate_pareto_values",
    "existence_verdict",
    "nondominated_filter",
]
