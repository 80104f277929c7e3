"""
Tests for the bundled example catalog.
"""

from types import SimpleNamespace

import numpy as np
import pytest

from polypareto.core.catalog import (
    CATALOG,
    _check_candidates_near,
    _check_verified_near,
    attained_front_distance,
    catalog_entries,
    parabola_distance,
    run_catalog,
)
from polypareto.core.pareto import PARETO_VERIFIED_LOCAL, FindResult, ParetoPoint
from polypareto.core.report_exporter import ReportExporter


@pytest.mark.unit
class TestCatalogEntries:

    def test_fixed_order(self):
        assert [e.name for e in catalog_entries()] == [e.name for e in CATALOG]

    def test_selection_keeps_catalog_order(self):
        assert [e.name for e in catalog_entries(["rsps", "motzkin"])] == ["motzkin", "rsps"]

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            catalog_entries(["motzkin", "nonexistent"])

    def test_every_entry_has_checks(self):
        assert all(entry.checks for entry in CATALOG)
        assert [e.name for e in CATALOG if e.exploratory] == ["kurdyka_exploratory"]

    def test_front_distances(self):
        assert attained_front_distance((1.0, -1.0)) == pytest.approx(0.0, abs=1e-6)
        assert attained_front_distance((0.0, 1.0)) == pytest.approx(1.0, abs=1e-6)
        assert parabola_distance((-2.0, 4.0)) == pytest.approx(0.0, abs=1e-6)
        assert parabola_distance((0.0, -1.0)) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.integration
class TestQuickEntries:

    @pytest.mark.parametrize("name", ["rsps", "linear_indep"])
    def test_rabier_entries_pass(self, config_manager, name):
        report = run_catalog(config_manager, seed=0, names=[name])
        assert report.passed, report.to_dict()

    def test_seed_does_not_leak_into_manager(self, config_manager):
        run_catalog(config_manager, seed=7, names=["rsps"])
        assert config_manager.get('run.seed') == 0


@pytest.mark.integration
@pytest.mark.slow
class TestFullCatalog:

    @pytest.mark.parametrize("name", [e.name for e in CATALOG])
    def test_entry_passes(self, config_manager, name):
        report = run_catalog(config_manager, seed=0, names=[name])
        entry = report.entries[0]
        assert entry.error is None
        assert entry.passed, entry.to_dict()

    def test_same_seed_same_report(self, config_manager):
        names = ["motzkin", "hyperbola", "rsps"]
        exporter = ReportExporter(config_manager)
        first = exporter.render_json(exporter.build_report("catalog", run_catalog(config_manager, 0, names).to_dict(), 0, {}))
        second = exporter.render_json(exporter.build_report("catalog", run_catalog(config_manager, 0, names).to_dict(), 0, {}))
        assert first == second


class _FixedAnalyzer:
    """Hands back precomputed search results."""

    def __init__(self, found=None, candidates=None):
        self._found = found
        self._candidates = candidates

    def find(self, f, tbar):
        return self._found

    def candidates(self, f):
        return self._candidates


@pytest.mark.unit
class TestChecks:

    corners = [(1, 1), (1, -1), (-1, 1), (-1, -1)]

    def _found(self, xs):
        return FindResult(points=[
            ParetoPoint(x=np.array(x, dtype=float), value=np.array([0.0]), kind=PARETO_VERIFIED_LOCAL) for x in xs
        ])

    def test_every_minimizer_required(self):
        check = _check_verified_near(self.corners, 1e-4, 0.0, 1e-6)
        analyzer = _FixedAnalyzer(found=self._found([(1, 1), (-1, 1), (-1, -1)]))
        result = check(analyzer, SimpleNamespace(f=None, tbar=None))
        assert not result.passed
        assert result.detail["missing_targets"] == [[1.0, -1.0]]

    def test_all_minimizers_found(self):
        check = _check_verified_near(self.corners, 1e-4, 0.0, 1e-6)
        result = check(_FixedAnalyzer(found=self._found(self.corners)), SimpleNamespace(f=None, tbar=None))
        assert result.passed

    def test_front_candidates_must_be_flagged(self):
        points = [np.array([-2.0, 4.0]), np.array([-1.0, 1.0]), np.array([-1.0, 2.0])]
        check = _check_candidates_near(parabola_distance, 0.05, (-3.0, 0.0))
        flagged = SimpleNamespace(points=points, nondominated=[True, True, False])
        assert check(_FixedAnalyzer(candidates=flagged), SimpleNamespace(f=None)).passed
        dropped = SimpleNamespace(points=points, nondominated=[False, True, False])
        result = check(_FixedAnalyzer(candidates=dropped), SimpleNamespace(f=None))
        assert not result.passed
        assert result.detail["n_flagged_dominated"] == 1
