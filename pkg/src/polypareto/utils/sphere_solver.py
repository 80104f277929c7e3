"""
Riemannian gradient descent on a Euclidean sphere.

Used for weighted scalarisations on spheres, properness residuals and the
section sweep. Steps are Barzilai-Borwein estimates of 1/L with Armijo
backtracking; every trial point is retracted back onto the sphere.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], Tuple[float, np.ndarray]]

_ARMIJO = 1e-4
_MAX_BACKTRACKS = 60


@dataclass
class SphereSolution:
    x: np.ndarray
    value: float
    tangent_gradient_norm: float
    converged: bool
    iterations: int


def retract(x: np.ndarray, radius: float) -> np.ndarray:
    norm = np.linalg.norm(x)
    if norm == 0.0 or not np.isfinite(norm):
        raise FloatingPointError("cannot retract a zero or non-finite point onto the sphere")
    return x * (radius / norm)


def tangent_component(gradient: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Projection of ``gradient`` onto the tangent space of the sphere at x."""
    return gradient - (gradient @ x) / (x @ x) * x


def minimize_on_sphere(
    objective: Objective,
    start: np.ndarray,
    radius: float,
    max_iterations: int = 3000,
    grad_tol: float = 1e-9,
    relative_tol: float = 1e-8,
) -> SphereSolution:
    """
    Minimise ``objective`` on the sphere of the given radius.

    Args:
        objective: Callable returning (value, Euclidean gradient)
        start: Starting point (rescaled onto the sphere)
        radius: Sphere radius
        max_iterations: Iteration cap
        grad_tol: Converged once the tangent gradient is below grad_tol * (1 + |value|)
        relative_tol: ... and below relative_tol * ||gradient||

    Returns:
        SphereSolution; ``converged`` is False when the cap is hit or the
        line search stalls above the absolute tolerance.
    """
    x = retract(np.asarray(start, dtype=float), radius)
    value, gradient = objective(x)
    if not np.isfinite(value):
        return SphereSolution(x, float(value), float("inf"), False, 0)

    step = 0.0
    previous_x = None
    previous_rg = None
    rg = tangent_component(gradient, x)
    rg_norm = float(np.linalg.norm(rg))

    for iteration in range(max_iterations):
        absolute_ok = rg_norm <= grad_tol * (1.0 + abs(value))
        if absolute_ok and rg_norm <= relative_tol * float(np.linalg.norm(gradient)):
            return SphereSolution(x, float(value), rg_norm, True, iteration)
        if rg_norm == 0.0:
            return SphereSolution(x, float(value), rg_norm, True, iteration)

        if previous_x is not None:
            s = x - previous_x
            y = rg - previous_rg
            sy = float(s @ y)
            step = abs(float(s @ s) / sy) if sy != 0.0 else 2.0 * step
        if step <= 0.0 or not np.isfinite(step):
            step = 0.1 * radius / rg_norm
        # Never move further than one radius in a single step.
        step = min(step, radius / rg_norm)

        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            trial = retract(x - step * rg, radius)
            trial_value, trial_gradient = objective(trial)
            if np.isfinite(trial_value) and trial_value <= value - _ARMIJO * step * rg_norm ** 2:
                accepted = True
                break
            step *= 0.5

        if not accepted:
            logger.debug(f"Sphere line search stalled at radius {radius:g} after {iteration} iterations")
            return SphereSolution(x, float(value), rg_norm, absolute_ok, iteration)

        previous_x, previous_rg = x, rg
        x, value, gradient = trial, trial_value, trial_gradient
        rg = tangent_component(gradient, x)
        rg_norm = float(np.linalg.norm(rg))

    logger.debug(f"Sphere solver hit the iteration cap at radius {radius:g}")
    converged = rg_norm <= grad_tol * (1.0 + abs(value))
    return SphereSolution(x, float(value), rg_norm, converged, max_iterations)
