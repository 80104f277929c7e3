"""
Tests for problem file parsing and the bundled problems.
"""

import numpy as np
import pytest

from polypareto.core.catalog import CATALOG
from polypareto.core.polynomial import ParseError
from polypareto.utils.problem_file import ProblemFileError, load_problem, parse_problem, parse_vector

MOTZKIN_FILE = """\
# Motzkin polynomial
vars: 2

x1^2*x2^4 + x1^4*x2^2 - 3*x1^2*x2^2 + 1   # single component
tbar: 0.5
budget: tangency.n_seeds=16, pareto.box_radius=2
"""


@pytest.mark.unit
class TestParseProblem:

    def test_full_file(self, motzkin):
        problem = parse_problem(MOTZKIN_FILE, "motzkin")
        assert problem.f == motzkin
        np.testing.assert_array_equal(problem.tbar, [0.5])
        assert problem.budget_overrides == [
            ("budgets.tangency.n_seeds", 16),
            ("budgets.pareto.box_radius", 2),
        ]

    def test_tbar_with_infinity(self):
        problem = parse_problem("vars: 1\nx1\nx1^2\ntbar: inf, 3")
        assert problem.tbar[0] == np.inf
        assert problem.tbar[1] == 3.0

    def test_tbar_may_precede_components(self):
        problem = parse_problem("vars: 2\ntbar: 1\nx1*x2")
        assert problem.f.ncomponents == 1

    def test_optional_lines(self):
        problem = parse_problem("vars: 3\nx1\nx2")
        assert problem.tbar is None
        assert problem.budget_overrides == []
        assert problem.f.nvars == 3

    @pytest.mark.parametrize("text", [
        "x1\nvars: 1",
        "x1",
        "vars: 2",
        "vars: 2\nvars: 2\nx1",
        "vars: 0\nx1",
        "vars: two\nx1",
        "vars: 1\nx1\ntbar: 1, 2",
        "vars: 1\nx1\ntbar: low",
        "vars: 1\nx1\nbudget: tangency.n_seeds",
    ])
    def test_structural_errors(self, text):
        with pytest.raises(ProblemFileError):
            parse_problem(text)

    def test_polynomial_error_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_problem("vars: 2\n\nx1 + ")
        assert info.value.line == 3

    def test_variable_out_of_range(self):
        with pytest.raises(IndexError):
            parse_problem("vars: 2\nx3")


@pytest.mark.unit
class TestParseVector:

    def test_numbers(self):
        np.testing.assert_array_equal(parse_vector("1, -2.5,3e2"), [1.0, -2.5, 300.0])

    def test_infinities(self):
        values = parse_vector("inf,-inf")
        assert values[0] == np.inf and values[1] == -np.inf

    @pytest.mark.parametrize("text", ["", "1,,2", "1,a"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_vector(text)


@pytest.mark.unit
class TestLoadProblem:

    def test_load_from_disk(self, tmp_path):
        path = tmp_path / "circle.vp"
        path.write_text("vars: 2\nx1^2 + x2^2\n", encoding="utf-8")
        problem = load_problem(path)
        assert problem.name == "circle"
        assert problem.path == path

    def test_missing_file(self, tmp_path):
        with pytest.raises(ProblemFileError):
            load_problem(tmp_path / "absent.vp")

    @pytest.mark.parametrize("name", [entry.name for entry in CATALOG])
    def test_bundled_problems_parse(self, bundled, name):
        problem = bundled(name)
        assert problem.name == name
        assert problem.f.ncomponents >= 1
        if problem.tbar is not None:
            assert problem.tbar.shape == (problem.f.ncomponents,)
        assert all(key.startswith("budgets.") for key, _ in problem.budget_overrides)
