"""
Tests for the analysis controller and the analyses it wires together.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from polypareto.core.analyzer import ProblemAnalyzer
from polypareto.core.pareto import EXISTS_WITH_WITNESS, NO_CONCLUSION, nondominated_mask


@pytest.mark.unit
class TestBudgets:

    def test_budgets_follow_configuration(self, config_manager):
        config_manager.apply_overrides([
            ("budgets.tangency.n_seeds", 5),
            ("budgets.pareto.box_radius", 2.0),
            ("tolerances.cluster_rtol", 1e-2),
            ("run.seed", 13),
        ])
        analyzer = ProblemAnalyzer(config_manager, threads=1)
        tangency = analyzer.tangency_config()
        assert tangency.n_seeds == 5
        assert tangency.cluster_rtol == 1e-2
        assert tangency.seed == 13
        assert analyzer.pareto_budget().box_radius == 2.0
        assert analyzer.pareto_budget(verify=False).verify_samples == 0

    def test_sublevel_passed_through(self, config_manager):
        config = ProblemAnalyzer(config_manager, threads=1).tangency_config([0.5])
        np.testing.assert_array_equal(config.sublevel, [0.5])

    def test_budget_summary(self, config_manager):
        summary = ProblemAnalyzer(config_manager, threads=1).budget_summary()
        assert set(summary) == {"budgets", "tolerances"}


@pytest.mark.unit
class TestWorkers:

    def test_single_worker_has_no_pool(self, config_manager):
        assert ProblemAnalyzer(config_manager, threads=1).executor is None

    def test_pool_created_and_shut_down(self, config_manager):
        with ProblemAnalyzer(config_manager, threads=2) as analyzer:
            assert isinstance(analyzer.executor, ThreadPoolExecutor)
            assert analyzer.executor is analyzer.executor
        assert analyzer._executor is None

    def test_configured_worker_count(self, config_manager):
        config_manager.apply_overrides([("performance.max_workers", 3)])
        assert ProblemAnalyzer(config_manager).max_workers == 3


@pytest.mark.integration
class TestAnalyses:

    def test_rabier_and_evaluate(self, config_manager, rsps):
        analyzer = ProblemAnalyzer(config_manager, threads=1)
        np.testing.assert_allclose(analyzer.evaluate(rsps, [1.0, 2.0]), [5.0, -3.0])
        assert analyzer.rabier(rsps, [3.0, 0.0]).value <= 1e-8

    def test_thread_count_does_not_change_results(self, config_manager, rsps):
        config_manager.apply_overrides([("budgets.tangency.n_seeds", 8), ("budgets.tangency.radius_steps", 6)])
        with ProblemAnalyzer(config_manager, threads=1) as serial:
            first = serial.tangency(rsps).to_dict(include_traces=True)
        with ProblemAnalyzer(config_manager, threads=4) as pooled:
            second = pooled.tangency(rsps).to_dict(include_traces=True)
        assert first == second


@pytest.mark.integration
@pytest.mark.slow
class TestExistence:

    def _analyzer(self, config_manager, problem):
        config_manager.apply_overrides(problem.budget_overrides)
        return ProblemAnalyzer(config_manager)

    def test_search_is_reused(self, config_manager, motzkin):
        with ProblemAnalyzer(config_manager) as analyzer:
            assert analyzer.find(motzkin, [0.5]) is analyzer.find(motzkin, [0.5])

    def test_attained_front(self, config_manager, bundled):
        problem = bundled("attained_front")
        with self._analyzer(config_manager, problem) as analyzer:
            report = analyzer.existence(problem.f, problem.tbar)
        assert report.verdict == EXISTS_WITH_WITNESS
        assert report.theorem_path == "attained_pareto_point"

    def test_open_quadrant(self, config_manager, bundled):
        problem = bundled("open_quadrant")
        with self._analyzer(config_manager, problem) as analyzer:
            assert analyzer.existence(problem.f).verdict == NO_CONCLUSION

    def test_motzkin_candidates(self, config_manager, motzkin):
        with ProblemAnalyzer(config_manager) as analyzer:
            candidates = analyzer.candidates(motzkin)
        assert any(abs(p[0]) <= 1e-4 for p in candidates.nondominated_points())
        assert candidates.nondominated == nondominated_mask(candidates.points).tolist()
        assert any(abs(p[0] - 1.0) <= 0.05 for p in candidates.points)
