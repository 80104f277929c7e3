"""
Rabier function evaluation for polypareto.

nu_f(x) is the smallest Euclidean norm of a signed combination
sum_i lambda_i grad f_i(x) with sum_i |lambda_i| = 1. Each sign orthant is a
min-norm problem over the probability simplex, solved by an away-step
Frank-Wolfe iteration with exact line search.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from .polynomial import PolyMap

logger = logging.getLogger(__name__)


class BudgetExceeded(Exception):
    """Raised when the simplex QP misses its gap tolerance within the iteration cap."""

    def __init__(self, message: str, result: "RabierResult"):
        super().__init__(message)
        self.result = result


@dataclass
class RabierBudget:
    max_iterations: int = 10000
    max_components: int = 16
    gap_rtol: float = 1e-12


@dataclass
class RabierResult:
    """Value of nu_f at a point and the signed weights attaining it."""
    value: float
    weights: np.ndarray
    orthant: Tuple[int, ...]
    converged: bool = True
    iterations: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "weights": self.weights.tolist(),
            "orthant": list(self.orthant),
            "converged": self.converged,
            "iterations": self.iterations,
        }


def simplex_min_norm(
    A: np.ndarray,
    max_iterations: int,
    gap_tol: float,
) -> Tuple[np.ndarray, float, bool, int]:
    """
    Minimise ||A mu||^2 over the probability simplex.

    Args:
        A: n x m matrix, one column per vertex of the simplex
        max_iterations: Iteration cap
        gap_tol: Stop when the Frank-Wolfe gap falls below this

    Returns:
        (mu, objective value, converged flag, iterations used)
    """
    m = A.shape[1]
    column_norms = np.einsum("ij,ij->j", A, A)
    mu = np.zeros(m)
    mu[int(np.argmin(column_norms))] = 1.0
    v = A @ mu

    for iteration in range(max_iterations):
        grad = 2.0 * (A.T @ v)
        inner = float(grad @ mu)
        toward = int(np.argmin(grad))
        fw_gap = inner - float(grad[toward])
        if fw_gap <= gap_tol:
            return mu, float(v @ v), True, iteration

        active = np.flatnonzero(mu > 0.0)
        away = int(active[np.argmax(grad[active])])
        away_gap = float(grad[away]) - inner

        direction = -mu.copy()
        if fw_gap >= away_gap:
            direction[toward] += 1.0
            gamma_max = 1.0
        else:
            direction = mu.copy()
            direction[away] -= 1.0
            gamma_max = mu[away] / (1.0 - mu[away])

        Ad = A @ direction
        curvature = float(Ad @ Ad)
        if curvature <= 0.0:
            gamma = gamma_max
        else:
            gamma = min(max(-float(v @ Ad) / curvature, 0.0), gamma_max)

        mu = mu + gamma * direction
        mu[mu < 1e-15] = 0.0
        mu /= mu.sum()
        v = A @ mu

    return mu, float(v @ v), False, max_iterations


def rabier_from_jacobian(
    J: np.ndarray,
    budget: Optional[RabierBudget] = None,
    strict: bool = False,
) -> RabierResult:
    """
    Rabier value for a given m x n Jacobian.

    Orthants are visited with +1 before -1 in each position. Patterns s and -s
    give the same value, so only those starting with +1 are solved; the first
    strictly smaller value wins, which keeps the lexicographically smallest
    attaining pattern.
    """
    budget = budget or RabierBudget()
    J = np.asarray(J, dtype=float)
    m = J.shape[0]
    if m > budget.max_components:
        raise ValueError(f"Orthant enumeration supports at most {budget.max_components} components, got {m}")

    row_norms = np.linalg.norm(J, axis=1)
    if m == 1:
        return RabierResult(float(row_norms[0]), np.ones(1), (1,))
    if not np.any(row_norms > 0.0):
        weights = np.zeros(m)
        weights[0] = 1.0
        return RabierResult(0.0, weights, (1,) * m)

    gap_tol = budget.gap_rtol * (1.0 + float(np.sum(J * J)))
    best: Optional[RabierResult] = None
    for tail in itertools.product((1, -1), repeat=m - 1):
        signs = np.array((1,) + tail, dtype=float)
        A = (J * signs[:, None]).T
        mu, objective, converged, iterations = simplex_min_norm(A, budget.max_iterations, gap_tol)
        value = float(np.sqrt(max(objective, 0.0)))
        if best is None or value < best.value:
            best = RabierResult(
                value=value,
                weights=signs * mu,
                orthant=tuple(int(s) for s in signs),
                converged=converged,
                iterations=iterations,
            )
        elif not converged:
            best.converged = False

    assert best is not None
    if not best.converged:
        message = f"Simplex QP did not reach gap {gap_tol:.3g} within {budget.max_iterations} iterations"
        if strict:
            raise BudgetExceeded(message, best)
        logger.warning(message)
    return best


def rabier_nu(
    f: PolyMap,
    x: Sequence[float],
    budget: Optional[RabierBudget] = None,
    strict: bool = False,
) -> RabierResult:
    """
    Evaluate the Rabier function of f at x.

    Args:
        f: Polynomial map
        x: Finite point in R^n
        budget: Iteration cap and gap tolerance for the simplex QP
        strict: Raise BudgetExceeded instead of returning a flagged result

    Returns:
        RabierResult with the value, signed weights and attaining orthant
    """
    return rabier_from_jacobian(f.jacobian(x), budget, strict)
