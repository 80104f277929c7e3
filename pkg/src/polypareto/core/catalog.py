"""
Bundled example catalog for polypareto.

Each entry names a problem file under ``resources/problems`` and a list of
checks reproducing its known behaviour. ``run_catalog`` runs every check
with the analyzer budgets and reports pass/fail per check.
"""

import copy
import logging
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..config.manager import ConfigurationManager
from ..utils.problem_file import ProblemFile, parse_problem
from .analyzer import ProblemAnalyzer
from .newton import is_convenient
from .pareto import (
    CERTIFICATE_PLUS_BOUNDED_SECTION,
    EXISTS_WITH_WITNESS,
    NO_CONCLUSION,
    FindResult,
)
from .sublevel import EMPTY_SECTION, NO_WITNESS_FOUND, NOT_PROPER_WITNESS, UNBOUNDED_WITNESS

logger = logging.getLogger(__name__)

PROBLEM_PACKAGE = "polypareto.resources.problems"


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


Check = Callable[[ProblemAnalyzer, ProblemFile], CheckResult]


@dataclass
class CatalogEntry:
    name: str
    description: str
    checks: List[Check] = field(default_factory=list)
    exploratory: bool = False

    def load(self) -> ProblemFile:
        return load_bundled_problem(self.name)


@dataclass
class EntryReport:
    name: str
    checks: List[CheckResult]
    exploratory: bool = False
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "exploratory": self.exploratory,
            "error": self.error,
            "checks": [c.to_dict() for c in self.checks],
        }


@dataclass
class CatalogReport:
    entries: List[EntryReport]
    seed: int

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "seed": self.seed, "entries": [e.to_dict() for e in self.entries]}


def load_bundled_problem(name: str) -> ProblemFile:
    """Parse ``<name>.vp`` from the bundled problem directory."""
    text = resources.files(PROBLEM_PACKAGE).joinpath(f"{name}.vp").read_text(encoding="utf-8")
    return parse_problem(text, name)


# ---------------------------------------------------------------------------
# Helpers shared by the checks
# ---------------------------------------------------------------------------

def _find(analyzer: ProblemAnalyzer, problem: ProblemFile) -> FindResult:
    return analyzer.find(problem.f, problem.tbar)


def attained_front_distance(value: Sequence[float], r_max: float = 2.0, samples: int = 200001) -> float:
    """Distance from a value to the curve {(r^2, -r^3) : 0 <= r <= r_max}."""
    r = np.linspace(0.0, r_max, samples)
    curve = np.column_stack([r ** 2, -(r ** 3)])
    return float(np.min(np.linalg.norm(curve - np.asarray(value, dtype=float), axis=1)))


def parabola_distance(value: Sequence[float], t_min: float = -3.0, samples: int = 300001) -> float:
    """Distance from a value to the arc {(t, t^2) : t_min <= t <= 0}."""
    t = np.linspace(t_min, 0.0, samples)
    curve = np.column_stack([t, t ** 2])
    return float(np.min(np.linalg.norm(curve - np.asarray(value, dtype=float), axis=1)))


def _check_verified_near(points: Sequence[Sequence[float]], x_tol: float, value: float, value_tol: float) -> Check:
    targets = np.asarray(points, dtype=float)

    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        found = _find(analyzer, problem)
        verified = found.verified()
        x_errors = [float(np.min(np.linalg.norm(targets - p.x, axis=1))) for p in verified]
        value_errors = [float(np.max(np.abs(p.value - value))) for p in verified]
        # every target needs its own verified point
        missing = [t.tolist() for t in targets if not any(np.linalg.norm(t - p.x) <= x_tol for p in verified)]
        passed = bool(verified) and not missing and max(x_errors) <= x_tol and max(value_errors) <= value_tol
        return CheckResult("verified_minimizers", passed, {
            "n_verified": len(verified),
            "missing_targets": missing,
            "max_x_error": max(x_errors) if x_errors else None,
            "max_value_error": max(value_errors) if value_errors else None,
        })

    return check


def _check_tangency_contains(value: Sequence[float], tol: float) -> Check:
    target = np.asarray(value, dtype=float)

    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        estimate = analyzer.tangency(problem.f)
        distances = [float(np.linalg.norm(c.center - target)) for c in estimate.clusters]
        best = min(distances) if distances else None
        return CheckResult("tangency_contains", best is not None and best <= tol, {
            "target": target.tolist(), "distance": best, "n_clusters": len(distances),
        })

    return check


def _check_tangency_only(value: Sequence[float], tol: float) -> Check:
    target = np.asarray(value, dtype=float)

    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        estimate = analyzer.tangency(problem.f)
        distances = [float(np.linalg.norm(c.center - target)) for c in estimate.clusters]
        passed = bool(distances) and max(distances) <= tol
        return CheckResult("tangency_only", passed, {
            "target": target.tolist(), "distances": distances,
        })

    return check


def _check_properness(tbar: Sequence[float], expected: str) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        report = analyzer.properness(problem.f, tbar)
        return CheckResult(f"properness_{expected}", report.verdict == expected, {
            "tbar": list(tbar), "verdict": report.verdict,
        })

    return check


def _check_section(tbar: Sequence[float], expected: str) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        report = analyzer.section(problem.f, tbar)
        return CheckResult(f"section_{expected}", report.verdict == expected, {
            "tbar": list(tbar), "verdict": report.verdict,
        })

    return check


def _check_convenient(expected: bool) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        flags, convenient = is_convenient(problem.f)
        return CheckResult("convenient", convenient == expected, {"flags": flags})

    return check


def _check_nothing_found(max_infimum: Optional[float] = None) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        found = _find(analyzer, problem)
        infimum = found.observed_infimum
        passed = not found.verified()
        if max_infimum is not None:
            passed = passed and infimum is not None and float(np.max(infimum)) <= max_infimum
        return CheckResult("no_pareto_point", passed, {
            "n_verified": len(found.verified()),
            "observed_infimum": None if infimum is None else infimum.tolist(),
        })

    return check


def _check_front(min_points: int, distance: Callable[[Sequence[float]], float], tol: float) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        verified = _find(analyzer, problem).verified()
        errors = [distance(p.value) for p in verified]
        passed = len(verified) >= min_points and max(errors, default=0.0) <= tol
        return CheckResult("front_points", passed, {
            "n_verified": len(verified), "max_distance": max(errors, default=None),
        })

    return check


def _check_candidates_near(distance: Callable[[Sequence[float]], float], tol: float, t1_range: Sequence[float]) -> Check:
    lo, hi = t1_range

    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        candidates = analyzer.candidates(problem.f)
        near = [
            keep for p, keep in zip(candidates.points, candidates.nondominated)
            if lo <= p[0] <= hi and distance(p) <= tol
        ]
        passed = bool(near) and all(near)
        return CheckResult("candidates_near_front", passed, {
            "n_candidates": len(candidates.points),
            "n_near_front": len(near),
            "n_flagged_dominated": len(near) - sum(near),
        })

    return check


def _check_containment(factor: float = 3.0) -> Check:
    """Every verified Pareto value lies near the candidate value set."""
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        found = _find(analyzer, problem)
        verified = found.verified()
        if not verified:
            return CheckResult("candidate_containment", True, {"n_verified": 0})
        candidates = analyzer.candidates(problem.f, found)
        rtol = analyzer.config_manager.get('tolerances.cluster_rtol')
        gaps = [
            candidates.distance_to(p.value) - factor * rtol * (1.0 + float(np.linalg.norm(p.value)))
            for p in verified
        ]
        return CheckResult("candidate_containment", max(gaps) <= 0.0, {
            "n_verified": len(verified), "worst_gap": max(gaps),
        })

    return check


def _check_existence(accepted: Sequence[str], tbar: Optional[Sequence[float]] = None) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        report = analyzer.existence(problem.f, tbar)
        return CheckResult("existence_verdict", report.verdict in accepted, {
            "verdict": report.verdict, "theorem_path": report.theorem_path, "accepted": list(accepted),
        })

    return check


def _check_rabier_zero(points: Sequence[Sequence[float]], tol: float) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        values = [analyzer.rabier(problem.f, x).value for x in points]
        return CheckResult("rabier_vanishes", max(values) <= tol, {"values": values})

    return check


def _check_rabier_constant(expected: float, count: int, tol: float) -> Check:
    def check(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
        rng = np.random.default_rng(analyzer.seed)
        values = [analyzer.rabier(problem.f, x).value for x in rng.uniform(-10.0, 10.0, (count, problem.f.nvars))]
        spread = max(values) - min(values)
        passed = spread <= tol and abs(values[0] - expected) <= tol
        return CheckResult("rabier_constant", passed, {"spread": spread, "value": values[0], "expected": expected})

    return check


def _explore_tangency(analyzer: ProblemAnalyzer, problem: ProblemFile) -> CheckResult:
    estimate = analyzer.tangency(problem.f)
    return CheckResult("tangency_estimate", True, estimate.to_dict())


CATALOG: List[CatalogEntry] = [
    CatalogEntry("motzkin", "Motzkin polynomial", [
        _check_verified_near([(1, 1), (1, -1), (-1, 1), (-1, -1)], 1e-4, 0.0, 1e-6),
        _check_tangency_contains([1.0], 0.05),
        _check_properness([0.5], NO_WITNESS_FOUND),
        _check_properness([1.5], NOT_PROPER_WITNESS),
        _check_convenient(False),
        _check_containment(),
    ]),
    CatalogEntry("hyperbola", "Unattained infimum along a hyperbola", [
        _check_tangency_only([0.0], 1e-3),
        _check_section([-1e-3], EMPTY_SECTION),
        _check_nothing_found(max_infimum=1e-3),
    ]),
    CatalogEntry("unattained_front", "Pareto front not attained", [
        _check_candidates_near(parabola_distance, 0.05, (-3.0, 0.0)),
        _check_nothing_found(),
    ]),
    CatalogEntry("attained_front", "Attained Pareto front on the x3 axis", [
        _check_existence([EXISTS_WITH_WITNESS], (4.0, 8.0)),
        _check_front(5, attained_front_distance, 1e-3),
        _check_containment(),
    ]),
    CatalogEntry("motzkin_lift", "Motzkin polynomial lifted with two linear objectives", [
        _check_existence([EXISTS_WITH_WITNESS, CERTIFICATE_PLUS_BOUNDED_SECTION]),
    ]),
    CatalogEntry("open_quadrant", "Map onto the open quadrant", [
        _check_existence([NO_CONCLUSION]),
    ]),
    CatalogEntry("rsps", "Proper map with vanishing Rabier function", [
        _check_rabier_zero([(1.0, 0.0), (10.0, 0.0), (100.0, 0.0)], 1e-8),
    ]),
    CatalogEntry("linear_indep", "Independent linear map", [
        _check_rabier_constant(1.0 / np.sqrt(2.0), 20, 1e-9),
    ]),
    CatalogEntry("sum_linear", "Linear function unbounded below", [
        _check_section([0.0], UNBOUNDED_WITNESS),
    ]),
    CatalogEntry("kurdyka_exploratory", "Exploratory tangency estimate", [_explore_tangency], exploratory=True),
]


def catalog_entries(names: Optional[Sequence[str]] = None) -> List[CatalogEntry]:
    """
    Catalog entries in their fixed order, optionally restricted by name.

    Raises:
        ValueError: If a requested name is not in the catalog
    """
    if names is None:
        return list(CATALOG)
    known = {e.name: e for e in CATALOG}
    unknown = [n for n in names if n not in known]
    if unknown:
        raise ValueError(f"Unknown catalog entries: {', '.join(unknown)}")
    return [e for e in CATALOG if e.name in set(names)]


def run_entry(entry: CatalogEntry, config_manager: ConfigurationManager, seed: int, threads: Optional[int] = None) -> EntryReport:
    """Run one entry's checks with the entry's problem-file budget overrides applied."""
    problem = entry.load()
    manager = copy.deepcopy(config_manager)
    manager.apply_overrides(list(problem.budget_overrides) + [("run.seed", seed)], source=f"catalog entry {entry.name}")

    results: List[CheckResult] = []
    with ProblemAnalyzer(manager, threads) as analyzer:
        for check in entry.checks:
            result = check(analyzer, problem)
            level = logging.INFO if result.passed else logging.WARNING
            logger.log(level, f"Catalog {entry.name}/{result.name}: {'pass' if result.passed else 'FAIL'}")
            results.append(result)
    return EntryReport(entry.name, results, entry.exploratory)


def run_catalog(
    config_manager: ConfigurationManager,
    seed: int,
    names: Optional[Sequence[str]] = None,
    threads: Optional[int] = None,
) -> CatalogReport:
    """
    Run the catalog checks.

    Args:
        config_manager: Loaded configuration; each entry runs on a copy
        seed: Seed applied to every entry
        names: Restrict to these entries
        threads: Worker count override

    Returns:
        CatalogReport; ``passed`` is True iff every check of every entry passed
    """
    reports = []
    for entry in catalog_entries(names):
        try:
            reports.append(run_entry(entry, config_manager, seed, threads))
        except (ArithmeticError, ValueError) as e:
            logger.error(f"Catalog entry {entry.name} failed: {e}")
            reports.append(EntryReport(entry.name, [], entry.exploratory, error=str(e)))
    report = CatalogReport(reports, seed)
    logger.info(f"Catalog: {sum(e.passed for e in reports)}/{len(reports)} entries passed")
    return report
