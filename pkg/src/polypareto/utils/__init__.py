"""
Utility modules for polypareto.
"""

from .linalg import column_dependency, rank_tolerance, smallest_singular_value
from .sampling import child_rngs, cluster_points, simplex_weights

__all__ = [
    "column_dependency",
    "rank_tolerance",
    "smallest_singular_value",
    "child_rngs",
    "cluster_points",
    "simplex_weights",
]
