"""
Small dense linear-algebra helpers for polypareto.
"""

import numpy as np
from scipy.linalg import svdvals


def column_dependency(matrix: np.ndarray) -> float:
    """
    Smallest singular value of a matrix read as a set of columns.

    A matrix with more columns than rows always has dependent columns, so 0 is
    returned in that case instead of the smallest of its row-many singular values.
    """
    rows, cols = matrix.shape
    if cols == 0:
        return 0.0
    if cols > rows:
        return 0.0
    if not np.all(np.isfinite(matrix)):
        return float("inf")
    return float(svdvals(matrix)[-1])


def smallest_singular_value(matrix: np.ndarray) -> float:
    """Smallest of the min(rows, cols) singular values."""
    if matrix.size == 0:
        return 0.0
    if not np.all(np.isfinite(matrix)):
        return float("inf")
    return float(svdvals(matrix)[-1])


def rank_tolerance(matrix: np.ndarray, rtol: float) -> float:
    """rtol * (Frobenius norm + 1)."""
    return rtol * (float(np.linalg.norm(matrix)) + 1.0)
