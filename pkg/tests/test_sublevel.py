"""
Tests for the bounded-section, properness and Palais-Smale probes.
"""

import numpy as np
import pytest

from polypareto.core.polynomial import parse_poly_map
from polypareto.core.sublevel import (
    BOUNDED_LIKELY,
    EMPTY_SECTION,
    NO_WITNESS_FOUND,
    NOT_PROPER_WITNESS,
    PS_VIOLATION_WITNESS,
    UNBOUNDED_WITNESS,
    WEAK_PS_VIOLATION_WITNESS,
    PropernessBudget,
    SectionBudget,
    penalized_objective,
    penalty_coefficient,
    probe_bounded_section,
    probe_palais_smale,
    probe_properness,
    restore_feasibility,
)
from polypareto.core.tangency import TangencyConfig, estimate_tangency_values


@pytest.fixture
def motzkin_lift(bundled):
    return bundled("motzkin_lift").f


@pytest.mark.unit
class TestPenalty:

    def test_coefficient_ignores_infinite_levels(self):
        assert penalty_coefficient(np.array([3.0, np.inf, 4.0]), 10.0) == pytest.approx(60.0)

    def test_objective_and_gradient(self, rsps):
        objective = penalized_objective(rsps, np.array([1.0, 0.0]), np.array([1.0, np.inf]), 100.0)
        value, gradient = objective(np.array([1.0, 1.0]))
        # f = (2, 0), excess on the first component is 1
        assert value == pytest.approx(2.0 + 100.0)
        np.testing.assert_allclose(gradient, rsps.jacobian((1.0, 1.0)).T @ np.array([201.0, 0.0]))

    def test_objective_inside_sublevel(self, rsps):
        objective = penalized_objective(rsps, np.array([0.5, 0.5]), np.array([5.0, 5.0]), 100.0)
        value, _ = objective(np.array([1.0, 0.0]))
        assert value == pytest.approx(1.0)

    def test_restore_feasibility_reaches_sublevel(self):
        f = parse_poly_map("x1^2 + x2^2", 2)
        x = restore_feasibility(f, np.array([3.0, 4.0]), np.array([1.0]), 200)
        assert f.evaluate(x)[0] <= 1.0 + 1e-9

    def test_restore_feasibility_without_bounds(self, rsps):
        x = np.array([3.0, 4.0])
        assert restore_feasibility(rsps, x, np.array([np.inf, np.inf]), 200) is x


@pytest.mark.unit
class TestArguments:

    def test_tbar_length_checked(self, motzkin):
        with pytest.raises(ValueError):
            probe_bounded_section(motzkin, [1.0, 2.0], SectionBudget(n_starts=1))

    def test_negative_infinity_rejected(self, motzkin):
        with pytest.raises(ValueError):
            probe_properness(motzkin, [-np.inf], PropernessBudget(n_targets=1))


@pytest.mark.unit
def test_escape_witness_uses_restored_point(monkeypatch):
    f = parse_poly_map("x1\nx2^2", 2)
    outside = np.array([-1e7, 5.0])
    monkeypatch.setattr(
        "polypareto.core.sublevel._local_minimum", lambda objective, start, iter_cap: (outside.copy(), -1e7)
    )
    report = probe_bounded_section(f, [np.inf, 1.0], SectionBudget(n_starts=2, R_max=10.0, sweep_iterations=50))
    assert report.verdict == UNBOUNDED_WITNESS
    point, values = report.witness.points[0], report.witness.values[0]
    np.testing.assert_allclose(f.evaluate(point), values)
    assert values[1] <= 1.0 + 1e-4
    assert point[1] != pytest.approx(5.0)


@pytest.mark.integration
@pytest.mark.slow
class TestSectionProbe:

    def test_motzkin_bounded(self, motzkin):
        report = probe_bounded_section(motzkin, [2.0], SectionBudget())
        assert report.verdict == BOUNDED_LIKELY
        assert report.lower_envelope[0] == pytest.approx(0.0, abs=1e-6)

    def test_sum_of_coordinates_unbounded(self):
        f = parse_poly_map("x1 + x2", 2)
        report = probe_bounded_section(f, [0.0], SectionBudget())
        assert report.verdict == UNBOUNDED_WITNESS
        assert report.witness is not None

    def test_below_infimum_empty(self):
        f = parse_poly_map("x1^2*x2^2 - 2*x1*x2 + x1^2 + 1", 2)
        report = probe_bounded_section(f, [-1e-3], SectionBudget())
        assert report.verdict == EMPTY_SECTION

    def test_lifted_motzkin_unbounded_section(self, motzkin_lift):
        # x1 -> -inf along x2 = 0 keeps the third component at 1
        assert probe_bounded_section(motzkin_lift, [0.0, 0.0, 2.0], SectionBudget()).verdict == UNBOUNDED_WITNESS


@pytest.mark.integration
@pytest.mark.slow
class TestPropernessProbe:

    def test_motzkin_proper_below_one(self, motzkin):
        assert probe_properness(motzkin, [0.5], PropernessBudget()).verdict == NO_WITNESS_FOUND

    def test_motzkin_not_proper_above_one(self, motzkin):
        report = probe_properness(motzkin, [1.5], PropernessBudget())
        assert report.verdict == NOT_PROPER_WITNESS
        assert 1.0 - 1e-3 <= report.witness.limit[0] <= 1.5 + 1e-3


@pytest.mark.integration
@pytest.mark.slow
class TestPalaisSmaleProbe:

    def test_motzkin_violation_above_one(self, motzkin):
        report = probe_palais_smale(motzkin, [1.5])
        assert report.verdict in (PS_VIOLATION_WITNESS, WEAK_PS_VIOLATION_WITNESS)

    def test_motzkin_clean_below_one(self, motzkin):
        assert probe_palais_smale(motzkin, [0.5]).verdict == NO_WITNESS_FOUND


@pytest.mark.integration
@pytest.mark.slow
def test_clean_probes_imply_no_tangency_value(motzkin):
    tbar = np.array([0.5])
    section = probe_bounded_section(motzkin, tbar, SectionBudget())
    properness = probe_properness(motzkin, tbar, PropernessBudget())
    if section.verdict == BOUNDED_LIKELY and properness.verdict == NO_WITNESS_FOUND:
        assert estimate_tangency_values(motzkin, TangencyConfig(sublevel=tbar)).is_empty()
