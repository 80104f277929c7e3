"""
Tests for the Rabier function.
"""

import itertools

import numpy as np
import pytest

from polypareto.core.polynomial import parse_poly_map
from polypareto.core.rabier import (
    BudgetExceeded,
    RabierBudget,
    rabier_from_jacobian,
    rabier_nu,
    simplex_min_norm,
)


def _simplex_grid(resolution: int) -> np.ndarray:
    i, j = np.meshgrid(np.arange(resolution + 1), np.arange(resolution + 1), indexing="ij")
    keep = i + j <= resolution
    a, b = i[keep] / resolution, j[keep] / resolution
    return np.column_stack([a, b, 1.0 - a - b])


def _local_grid(center: np.ndarray, half_width: float, resolution: int) -> np.ndarray:
    offsets = np.linspace(-half_width, half_width, resolution)
    a, b = np.meshgrid(center[0] + offsets, center[1] + offsets, indexing="ij")
    a, b = a.ravel(), b.ravel()
    keep = (a >= 0.0) & (b >= 0.0) & (a + b <= 1.0)
    return np.column_stack([a[keep], b[keep], 1.0 - a[keep] - b[keep]])


def grid_oracle(J: np.ndarray, resolution: int) -> float:
    """Minimum of ||J^T lambda|| over a dense grid on the l1 sphere."""
    m = J.shape[0]
    if m == 1:
        return float(np.linalg.norm(J[0]))
    best = np.inf
    for tail in itertools.product((1.0, -1.0), repeat=m - 1):
        signs = np.array((1.0,) + tail)
        if m == 2:
            t = np.linspace(0.0, 1.0, resolution)
            values = np.linalg.norm((np.column_stack([t, 1.0 - t]) * signs) @ J, axis=1)
            best = min(best, float(values.min()))
            continue
        coarse = _simplex_grid(resolution)
        values = np.linalg.norm((coarse * signs) @ J, axis=1)
        center = coarse[int(np.argmin(values))]
        fine = np.vstack([center, _local_grid(center, 2.0 / resolution, 101)])
        best = min(best, float(np.linalg.norm((fine * signs) @ J, axis=1).min()))
    return best


@pytest.mark.unit
class TestRabierValues:

    def test_single_component_is_gradient_norm(self):
        f = parse_poly_map("x1^2 + x2^2", 2)
        result = rabier_nu(f, (1.0, 2.0))
        assert result.value == pytest.approx(2.0 * np.sqrt(5.0), rel=1e-14)
        assert result.orthant == (1,)

    def test_vanishes_on_axis_of_quadratic_pair(self, rsps):
        result = rabier_nu(rsps, (3.0, 0.0))
        assert result.value == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(result.weights, [0.5, -0.5], atol=1e-9)
        assert result.orthant == (1, -1)

    @pytest.mark.parametrize("k", [1.0, 10.0, 100.0])
    def test_vanishes_along_the_axis(self, rsps, k):
        assert rabier_nu(rsps, (k, 0.0)).value <= 1e-8

    def test_linear_map_constant_value(self, rng):
        f = parse_poly_map("x1\nx2", 2).padded(3)
        values = [rabier_nu(f, rng.normal(scale=5.0, size=3)).value for _ in range(20)]
        assert max(values) - min(values) <= 1e-9
        assert values[0] == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-9)
        assert values[0] == pytest.approx(grid_oracle(np.eye(2, 3), 10001), rel=1e-3)

    def test_all_gradients_zero(self):
        f = parse_poly_map("x1^2\nx2^2", 2)
        result = rabier_nu(f, (0.0, 0.0))
        assert result.value == 0.0
        np.testing.assert_allclose(result.weights, [1.0, 0.0])

    def test_too_many_components(self):
        with pytest.raises(ValueError):
            rabier_from_jacobian(np.ones((5, 2)), RabierBudget(max_components=4))

    def test_strict_budget_raises(self):
        # every orthant optimum is interior, so one iteration cannot close the gap
        J = np.eye(3, 4)
        with pytest.raises(BudgetExceeded) as info:
            rabier_from_jacobian(J, RabierBudget(max_iterations=1, gap_rtol=1e-300), strict=True)
        assert not info.value.result.converged

    def test_lenient_budget_flags_result(self):
        J = np.eye(3, 4)
        result = rabier_from_jacobian(J, RabierBudget(max_iterations=1, gap_rtol=1e-300))
        assert not result.converged
        assert result.value >= 0.0

    def test_simplex_solver_at_vertex(self):
        A = np.array([[1.0, 3.0], [0.0, 0.0]])
        mu, objective, converged, _ = simplex_min_norm(A, 100, 1e-14)
        assert converged
        np.testing.assert_allclose(mu, [1.0, 0.0])
        assert objective == pytest.approx(1.0)


@pytest.mark.unit
class TestRabierProperties:

    def test_result_invariants(self, rng):
        for _ in range(30):
            m, n = int(rng.integers(1, 4)), int(rng.integers(1, 5))
            J = rng.normal(size=(m, n))
            result = rabier_from_jacobian(J)
            assert result.value >= 0.0
            assert np.sum(np.abs(result.weights)) == pytest.approx(1.0, abs=1e-10)
            attained = float(np.linalg.norm(J.T @ result.weights))
            assert attained == pytest.approx(result.value, rel=1e-8, abs=1e-12)
            assert result.value <= np.linalg.norm(J, axis=1).min() + 1e-12

    @pytest.mark.parametrize("c", [2.0, -3.0, 0.5])
    def test_homogeneity(self, rng, c):
        for _ in range(10):
            J = rng.normal(size=(2, 3))
            base = rabier_from_jacobian(J).value
            assert rabier_from_jacobian(c * J).value == pytest.approx(abs(c) * base, rel=1e-8, abs=1e-12)

    def test_homogeneity_three_components(self, rng):
        for _ in range(10):
            J = rng.normal(size=(3, 4))
            base = rabier_from_jacobian(J).value
            for c in (2.0, -3.0, 0.5):
                assert rabier_from_jacobian(c * J).value == pytest.approx(abs(c) * base, rel=1e-6)

    def test_permutation_invariance(self, rng):
        for _ in range(10):
            J = rng.normal(size=(3, 4))
            base = rabier_from_jacobian(J).value
            for order in itertools.permutations(range(3)):
                assert rabier_from_jacobian(J[list(order)]).value == pytest.approx(base, rel=1e-6)

    def test_map_level_homogeneity(self, rsps):
        x = (1.0, 2.0)
        assert rabier_nu(rsps.scaled(-3.0), x).value == pytest.approx(3.0 * rabier_nu(rsps, x).value, rel=1e-8)


@pytest.mark.unit
def test_matches_grid_oracle(rng):
    for _ in range(50):
        m = int(rng.integers(2, 4))
        n = int(rng.integers(m + 1, 5))
        J = rng.normal(size=(m, n))
        value = rabier_from_jacobian(J).value
        oracle = grid_oracle(J, 100000 if m == 2 else 400)
        assert value <= oracle * (1.0 + 1e-8) + 1e-10
        assert (oracle - value) <= 1e-3 * oracle
