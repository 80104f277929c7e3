"""
Tests for dominance, Pareto point search and candidate Pareto values.
"""

import numpy as np
import pytest

from polypareto.core.pareto import (
    PARETO_VERIFIED_LOCAL,
    CandidateConfig,
    CriticalBudget,
    CriticalValue,
    DegenerateDimension,
    ParetoBudget,
    candidate_pareto_values,
    dominates,
    find_pareto_points,
    nondominated_filter,
    nondominated_mask,
    sample_critical_values,
    strictly_dominates,
    verify_point,
)
from polypareto.core.tangency import TangencyEstimate, ValueCluster


def brute_force_nondominated(points: np.ndarray) -> set:
    keep = set()
    for i, p in enumerate(points):
        if not any(dominates(q, p) for j, q in enumerate(points) if j != i):
            keep.add(i)
    return keep


@pytest.mark.unit
class TestDominance:

    def test_dominates(self):
        assert dominates([0, 1], [1, 1])
        assert not dominates([1, 1], [1, 1])
        assert not dominates([0, 2], [1, 1])

    def test_strict_dominance(self):
        assert strictly_dominates([0, 0], [1, 1])
        assert not strictly_dominates([0, 1], [1, 1])

    def test_tolerance(self):
        assert not dominates([1.0 - 1e-9, 1.0], [1.0, 1.0], tol=1e-6)
        assert dominates([0.5, 1.0 + 1e-9], [1.0, 1.0], tol=1e-6)

    def test_duplicates_both_kept(self):
        assert nondominated_mask([[1, 2], [1, 2], [2, 2]]).tolist() == [True, True, False]

    def test_reference_points_dominate_only(self):
        mask = nondominated_mask([[1, 1], [3, 0]], reference=np.array([[0.5, 0.5]]))
        assert mask.tolist() == [False, True]

    def test_empty(self):
        assert nondominated_mask([]).size == 0
        assert nondominated_filter([]) == []

    @pytest.mark.parametrize("m", [2, 3])
    def test_matches_pairwise_scan(self, rng, m):
        for _ in range(50):
            points = rng.integers(0, 20, size=(200, m)).astype(float)
            mask = nondominated_mask(points)
            assert set(np.flatnonzero(mask).tolist()) == brute_force_nondominated(points)

    def test_filter_properties(self, rng):
        points = rng.normal(size=(200, 3))
        kept = nondominated_filter(points)
        assert kept
        kept_array = np.array(kept)
        assert all(any(np.array_equal(k, p) for p in points) for k in kept)
        assert not any(dominates(a, b) for a in kept for b in kept)
        again = nondominated_filter(kept_array)
        assert len(again) == len(kept)


@pytest.mark.unit
class TestCriticalValues:

    def test_square_map_rejected(self, rsps):
        with pytest.raises(DegenerateDimension):
            sample_critical_values(rsps)

    @pytest.mark.integration
    def test_motzkin_critical_values(self, motzkin):
        values = sample_critical_values(motzkin, CriticalBudget(seed=0))
        centers = [v.center[0] for v in values]
        assert any(abs(c) <= 1e-4 for c in centers)
        assert any(abs(c - 1.0) <= 1e-4 for c in centers)


@pytest.mark.unit
class TestVerification:

    def test_global_minimum_verified(self, motzkin, rng):
        x = np.array([1.0, 1.0])
        kind, seen = verify_point(motzkin, x, motzkin.evaluate(x), [], ParetoBudget(verify_samples=200), rng)
        assert kind == PARETO_VERIFIED_LOCAL
        assert seen

    def test_origin_dominated(self, motzkin, rng):
        x = np.array([0.0, 0.0])
        kind, _ = verify_point(motzkin, x, motzkin.evaluate(x), [], ParetoBudget(verify_samples=200), rng)
        assert kind == "dominated"

    def test_invalid_budget(self, motzkin):
        with pytest.raises(ValueError):
            find_pareto_points(motzkin, [1.0], ParetoBudget(n_weights=0))

    def test_tbar_length(self, motzkin):
        with pytest.raises(ValueError):
            find_pareto_points(motzkin, [1.0, 1.0])


@pytest.mark.unit
class TestCandidateFlags:

    @pytest.fixture
    def front_candidates(self, monkeypatch):
        critical = [
            CriticalValue(center=np.array([t, 1.0 + t * t]), count=1, preimage=np.array([0.0, 0.0, t]))
            for t in (-1.0, 0.0)
        ]
        clusters = [
            ValueCluster(center=np.array([s, s * s]), count=1, trace_indices=[], min_nu=0.0,
                         min_nu_scaled=0.0, classification=[])
            for s in (-2.0, -1.0, -0.5)
        ]
        monkeypatch.setattr(
            "polypareto.core.pareto.sample_critical_values",
            lambda f, budget, extra_starts=None, executor=None: critical,
        )
        monkeypatch.setattr(
            "polypareto.core.pareto.estimate_tangency_values",
            lambda f, config, executor=None: TangencyEstimate(clusters=clusters, traces=[], n_started=0, n_lost=0),
        )
        monkeypatch.setattr(
            "polypareto.core.pareto._image_dominators",
            lambda f, preimages, points, budget, executor: [np.array([-2.1, 3.9])],
        )

    def test_flags_match_pairwise_scan(self, motzkin, front_candidates):
        candidates = candidate_pareto_values(motzkin, CandidateConfig())
        points = np.array(candidates.points)
        expected = brute_force_nondominated(points)
        assert {i for i, keep in enumerate(candidates.nondominated) if keep} == expected
        assert candidates.nondominated == [False, False, True, True, True]

    def test_image_values_kept_apart(self, motzkin, front_candidates):
        candidates = candidate_pareto_values(motzkin, CandidateConfig())
        assert candidates.image_nondominated == [False, False, False, True, True]
        row = candidates.to_dict()["candidates"][2]
        assert row["nondominated"] and not row["image_nondominated"]


@pytest.mark.integration
@pytest.mark.slow
class TestParetoSearch:

    def test_motzkin_minimisers(self, motzkin):
        result = find_pareto_points(motzkin, [0.5], ParetoBudget(seed=0, n_starts=64))
        verified = result.verified()
        for point in verified:
            assert point.value[0] == pytest.approx(0.0, abs=1e-6)
            np.testing.assert_allclose(np.abs(point.x), [1.0, 1.0], atol=1e-4)
        signs = {tuple(int(s) for s in np.sign(point.x)) for point in verified}
        assert signs == {(1, 1), (1, -1), (-1, 1), (-1, -1)}

    def test_attained_front(self, bundled):
        problem = bundled("attained_front")
        result = find_pareto_points(problem.f, problem.tbar, ParetoBudget(seed=0, n_epsilon_levels=12))
        verified = result.verified()
        assert len(verified) >= 5
        for point in verified:
            r = -np.cbrt(point.value[1])
            assert -1e-3 <= r <= 2.0 + 1e-3
            assert point.value[0] == pytest.approx(r * r, abs=1e-3)

    def test_unattained_front_empty(self, bundled):
        problem = bundled("unattained_front")
        assert find_pareto_points(problem.f, problem.tbar, ParetoBudget(seed=0)).verified() == []

    def test_same_seed_same_points(self, motzkin):
        first = find_pareto_points(motzkin, [0.5], ParetoBudget(seed=5, verify_samples=100)).to_dict()
        second = find_pareto_points(motzkin, [0.5], ParetoBudget(seed=5, verify_samples=100)).to_dict()
        assert first == second
