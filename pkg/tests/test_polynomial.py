"""
Tests for polynomial parsing, evaluation and differentiation.
"""

import numpy as np
import pytest

from polypareto.core.polynomial import (
    Monomial,
    ParseError,
    PolyMap,
    Polynomial,
    parse_poly_map,
    parse_polynomial,
)


def random_polynomial(rng: np.random.Generator, nvars: int, nterms: int, max_degree: int) -> Polynomial:
    terms = {}
    for _ in range(nterms):
        exponents = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=nvars))
        while sum(exponents) > max_degree:
            exponents = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=nvars))
        terms[exponents] = float(rng.uniform(-3.0, 3.0))
    return Polynomial(nvars, terms)


@pytest.mark.unit
class TestParsing:

    def test_motzkin_terms(self):
        p = parse_polynomial("x1^2*x2^4 + x1^4*x2^2 - 3*x1^2*x2^2 + 1", 2)
        assert len(p) == 4
        assert set(p.exponents) == {(2, 4), (4, 2), (2, 2), (0, 0)}
        assert p.coefficient((2, 2)) == -3.0
        assert p.degree == 6

    def test_equal_exponents_merge_and_cancel(self):
        p = parse_polynomial("x1*x2 + 2*x2*x1 - 3*x1*x2 + x1", 2)
        assert p.exponents == [(1, 0)]

    def test_repeated_variable_in_term(self):
        p = parse_polynomial("x1*x1^2", 1)
        assert p.term_dict() == {(3,): 1.0}

    def test_leading_minus_and_decimals(self):
        p = parse_polynomial("-0.5*x1 + 2.5e1", 1)
        assert p.coefficient((1,)) == -0.5
        assert p.coefficient((0,)) == 25.0

    def test_zero_polynomial(self):
        p = parse_polynomial("x1 - x1", 1)
        assert p.is_zero()
        assert p.degree == -1
        assert p.to_text() == "0"

    def test_variable_out_of_range(self):
        with pytest.raises(IndexError):
            parse_polynomial("x1 + x3", 2)

    def test_variable_zero_out_of_range(self):
        with pytest.raises(IndexError):
            parse_polynomial("x0", 2)

    @pytest.mark.parametrize("text, column", [
        ("x1 + ", 6),
        ("x1 $ x2", 4),
        ("2x1", 2),
        ("x1^x2", 4),
        ("x1^-2", 4),
    ])
    def test_malformed_text_reports_position(self, text, column):
        with pytest.raises(ParseError) as info:
            parse_polynomial(text, 2, line=7)
        assert info.value.line == 7
        assert info.value.column == column

    def test_empty_expression(self):
        with pytest.raises(ParseError):
            parse_polynomial("   ", 2)

    def test_map_line_numbers(self):
        with pytest.raises(ParseError) as info:
            parse_poly_map("x1\n\nx2 *", 2, first_line=3)
        assert info.value.line == 5

    def test_map_without_components(self):
        with pytest.raises(ParseError):
            parse_poly_map("\n  \n", 2)

    def test_canonical_reprint_reparses(self, rng):
        for _ in range(50):
            nvars = int(rng.integers(1, 5))
            p = random_polynomial(rng, nvars, int(rng.integers(1, 8)), 6)
            assert parse_polynomial(p.to_text(), nvars) == p

    def test_reprint_is_stable(self):
        p = parse_polynomial("1 - x2^2 + 3*x1*x2 - x1^3", 2)
        assert p.to_text() == "-x1^3 + 3*x1*x2 - x2^2 + 1"


@pytest.mark.unit
class TestPolynomialValues:

    def test_monomial_rejects_zero_coefficient(self):
        with pytest.raises(ValueError):
            Monomial((1, 0), 0.0)

    def test_monomial_rejects_negative_exponent(self):
        with pytest.raises(ValueError):
            Monomial((1, -1), 2.0)

    def test_motzkin_values(self, motzkin):
        for point in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
            assert motzkin.evaluate(point)[0] == pytest.approx(0.0, abs=1e-12)
        assert motzkin.evaluate((0, 0))[0] == 1.0
        assert motzkin.evaluate((5, 0))[0] == 1.0

    def test_motzkin_critical_point(self, motzkin):
        np.testing.assert_allclose(motzkin.jacobian((1, 1)), [[0.0, 0.0]], atol=1e-12)

    def test_jacobian_of_quadratic_map(self, rsps):
        np.testing.assert_allclose(rsps.jacobian((1.0, 2.0)), [[2.0, 4.0], [2.0, -4.0]])

    def test_evaluate_many_matches_evaluate(self, rsps, rng):
        X = rng.normal(size=(10, 2))
        expected = np.array([rsps.evaluate(x) for x in X])
        np.testing.assert_allclose(rsps.evaluate_many(X), expected)

    def test_point_dimension_checked(self, rsps):
        with pytest.raises(ValueError):
            rsps.evaluate((1.0, 2.0, 3.0))

    def test_derivative_out_of_range(self):
        with pytest.raises(IndexError):
            parse_polynomial("x1^2", 2).derivative(2)

    def test_hessian_of_motzkin_at_origin(self, motzkin):
        np.testing.assert_allclose(motzkin.hessian(0, (0.0, 0.0)), np.zeros((2, 2)))

    def test_hessian_symmetric(self, rng):
        p = random_polynomial(rng, 3, 6, 5)
        f = PolyMap(3, [p])
        H = f.hessian(0, rng.normal(size=3))
        np.testing.assert_allclose(H, H.T, rtol=1e-10, atol=1e-10)

    def test_arithmetic_is_linear(self, rng):
        p = random_polynomial(rng, 2, 5, 4)
        q = random_polynomial(rng, 2, 5, 4)
        x = rng.normal(size=2)
        combined = PolyMap(2, [p * 2.0 - q])
        expected = 2.0 * p.evaluate(x) - q.evaluate(x)
        assert combined.evaluate(x)[0] == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_variable_count_mismatch(self):
        with pytest.raises(ValueError):
            Polynomial.variable(2, 0) + Polynomial.variable(3, 0)

    def test_padded_ignores_new_variables(self):
        f = parse_poly_map("x1\nx2", 2).padded(3)
        assert f.nvars == 3
        np.testing.assert_allclose(f.evaluate((1.0, 2.0, 3.0)), [1.0, 2.0])
        np.testing.assert_allclose(f.jacobian((1.0, 2.0, 3.0)), [[1, 0, 0], [0, 1, 0]])

    def test_scaled_and_permuted(self, rsps):
        x = (1.5, -0.5)
        np.testing.assert_allclose(rsps.scaled(-3.0).evaluate(x), -3.0 * rsps.evaluate(x))
        np.testing.assert_allclose(rsps.permuted([1, 0]).evaluate(x), rsps.evaluate(x)[::-1])

    def test_maps_hash_by_content(self):
        assert hash(parse_poly_map("x1 + x2", 2)) == hash(parse_poly_map("x2 + x1", 2))


@pytest.mark.unit
def test_gradient_matches_finite_differences(rng):
    h = 1e-6
    for _ in range(100):
        nvars = int(rng.integers(1, 5))
        p = random_polynomial(rng, nvars, int(rng.integers(1, 7)), 5)
        f = PolyMap(nvars, [p])
        x = rng.uniform(-1.5, 1.5, size=nvars)
        gradient = f.jacobian(x)[0]
        for j in range(nvars):
            step = np.zeros(nvars)
            step[j] = h
            fd = (f.evaluate(x + step)[0] - f.evaluate(x - step)[0]) / (2 * h)
            scale = 1.0 + abs(gradient[j]) + abs(f.evaluate(x)[0])
            assert abs(fd - gradient[j]) <= 1e-5 * scale
