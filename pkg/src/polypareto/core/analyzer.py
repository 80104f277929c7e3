"""
Main analysis controller for polypareto.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..config.manager import ConfigurationManager
from .newton import KhovanskiiBudget, KhovanskiiResult, check_khovanskii, is_convenient, newton_polytope
from .pareto import (
    CandidateConfig,
    CandidateValueSet,
    CriticalBudget,
    ExistenceConfig,
    ExistenceReport,
    FindResult,
    ParetoBudget,
    candidate_pareto_values,
    existence_verdict,
    find_pareto_points,
)
from .polynomial import PolyMap
from .rabier import RabierBudget, RabierResult, rabier_nu
from .sublevel import (
    PalaisSmaleConfig,
    PalaisSmaleProbeReport,
    PropernessBudget,
    PropernessProbeReport,
    SectionBudget,
    SectionProbeReport,
    probe_bounded_section,
    probe_palais_smale,
    probe_properness,
)
from .tangency import TangencyConfig, TangencyEstimate, estimate_tangency_values


logger = logging.getLogger(__name__)


class ProblemAnalyzer:
    """Runs the analyses on one polynomial map with budgets taken from the configuration."""

    def __init__(self, config_manager: ConfigurationManager, threads: Optional[int] = None):
        self.config_manager = config_manager

        workers = threads or config_manager.get('performance.max_workers') or os.cpu_count() or 1
        self.max_workers = int(workers)
        self._executor: Optional[ThreadPoolExecutor] = None
        self._found: Dict[Tuple[PolyMap, Tuple[float, ...], bool], FindResult] = {}

        logger.info(f"ProblemAnalyzer initialized with {self.max_workers} workers")

    # Lifecycle

    @property
    def executor(self) -> Optional[ThreadPoolExecutor]:
        """Worker pool, created lazily; None when a single worker is configured."""
        if self.max_workers <= 1:
            return None
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.max_workers, thread_name_prefix="polypareto")
        return self._executor

    def shutdown(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
            logger.debug("Worker pool shut down")

    def __enter__(self) -> "ProblemAnalyzer":
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self.shutdown()

    # Budgets

    @property
    def seed(self) -> int:
        return int(self.config_manager.get('run.seed', 0))

    def _tol(self, name: str) -> float:
        return float(self.config_manager.get(f'tolerances.{name}'))

    def _budget(self, section: str) -> Dict[str, Any]:
        return dict(self.config_manager.get(f'budgets.{section}', {}))

    def rabier_budget(self) -> RabierBudget:
        record = self._budget('rabier')
        return RabierBudget(
            max_iterations=int(record['max_iterations']),
            max_components=int(record['max_components']),
            gap_rtol=self._tol('fw_gap_rtol'),
        )

    def tangency_config(self, sublevel: Optional[Sequence[float]] = None) -> TangencyConfig:
        record = self._budget('tangency')
        return TangencyConfig(
            n_seeds=int(record['n_seeds']),
            n_weights=int(record['n_weights']),
            radius_start=float(record['radius_start']),
            radius_factor=float(record['radius_factor']),
            radius_steps=int(record['radius_steps']),
            max_iterations=int(record['max_iterations']),
            dependency_tol=self._tol('dependency_tol'),
            cluster_rtol=self._tol('cluster_rtol'),
            slack_rtol=self._tol('slack_rtol'),
            grad_rtol=self._tol('grad_rtol'),
            sublevel=None if sublevel is None else np.asarray(sublevel, dtype=float),
            seed=self.seed,
            rabier=self.rabier_budget(),
        )

    def section_budget(self) -> SectionBudget:
        record = self._budget('sublevel')
        return SectionBudget(
            n_starts=int(record['n_starts']),
            R_max=float(record['R_max']),
            iter_cap=int(record['iter_cap']),
            divergence_threshold=float(record['divergence_threshold']),
            penalty_scale=float(record['penalty_scale']),
            escape_factor=float(record['escape_factor']),
            sweep_factor=float(record['sweep_factor']),
            sweep_iterations=int(record['sweep_iterations']),
            slack_rtol=self._tol('slack_rtol'),
            cluster_rtol=self._tol('cluster_rtol'),
            grad_rtol=self._tol('grad_rtol'),
            seed=self.seed,
        )

    def properness_budget(self) -> PropernessBudget:
        record = self._budget('sublevel')
        return PropernessBudget(
            n_targets=int(record['n_targets']),
            n_image_samples=int(record['n_image_samples']),
            sample_radius=float(record['sample_radius']),
            radius_start=float(record['radius_start']),
            radius_factor=float(record['radius_factor']),
            R_max=float(record['R_max']),
            max_iterations=int(self._budget('tangency')['max_iterations']),
            penalty_scale=float(record['penalty_scale']),
            witness_rtol=self._tol('witness_rtol'),
            slack_rtol=self._tol('slack_rtol'),
            cluster_rtol=self._tol('cluster_rtol'),
            grad_rtol=self._tol('grad_rtol'),
            seed=self.seed,
        )

    def palais_smale_config(self) -> PalaisSmaleConfig:
        record = self._budget('palais_smale')
        tangency = self._budget('tangency')
        sublevel = self._budget('sublevel')
        return PalaisSmaleConfig(
            n_seeds=int(record['n_seeds']),
            n_weights=int(record['n_weights']),
            radius_start=float(tangency['radius_start']),
            radius_factor=float(tangency['radius_factor']),
            radius_steps=int(record['radius_steps']),
            max_iterations=int(tangency['max_iterations']),
            penalty_scale=float(sublevel['penalty_scale']),
            dependency_tol=self._tol('dependency_tol'),
            slack_rtol=self._tol('slack_rtol'),
            cluster_rtol=self._tol('cluster_rtol'),
            grad_rtol=self._tol('grad_rtol'),
            seed=self.seed,
            rabier=self.rabier_budget(),
        )

    def khovanskii_budget(self) -> KhovanskiiBudget:
        record = self._budget('newton')
        return KhovanskiiBudget(
            n_starts=int(record['n_starts']),
            box=float(record['box']),
            min_abs_coordinate=float(record['min_abs_coordinate']),
            root_rtol=self._tol('root_rtol'),
            rank_rtol=self._tol('rank_rtol'),
            seed=self.seed,
        )

    def critical_budget(self) -> CriticalBudget:
        record = self._budget('critical')
        return CriticalBudget(
            n_starts=int(record['n_starts']),
            box_radius=float(record['box_radius']),
            iter_cap=int(record['iter_cap']),
            rank_rtol=self._tol('rank_rtol'),
            cluster_rtol=self._tol('cluster_rtol'),
            seed=self.seed,
        )

    def pareto_budget(self, verify: bool = True) -> ParetoBudget:
        record = self._budget('pareto')
        return ParetoBudget(
            n_weights=int(record['n_weights']),
            n_starts=int(record['n_starts']),
            box_radius=float(record['box_radius']),
            verify_samples=int(record['verify_samples']) if verify else 0,
            n_epsilon_levels=int(record['n_epsilon_levels']),
            improvement_starts=int(record['improvement_starts']),
            iter_cap=int(record['iter_cap']),
            penalty_scale=float(self._budget('sublevel')['penalty_scale']),
            slack_rtol=self._tol('slack_rtol'),
            verify_rtol=self._tol('verify_rtol'),
            cluster_rtol=self._tol('cluster_rtol'),
            seed=self.seed,
        )

    def candidate_config(self) -> CandidateConfig:
        return CandidateConfig(
            critical=self.critical_budget(),
            tangency=self.tangency_config(),
            pareto=self.pareto_budget(),
        )

    def existence_config(self) -> ExistenceConfig:
        return ExistenceConfig(
            section=self.section_budget(),
            properness=self.properness_budget(),
            palais_smale=self.palais_smale_config(),
            tangency=self.tangency_config(),
            khovanskii=self.khovanskii_budget(),
            pareto=self.pareto_budget(),
            n_image_samples=int(self._budget('pareto')['n_image_samples']),
            seed=self.seed,
        )

    def budget_summary(self) -> Dict[str, Any]:
        """Budgets and tolerances as recorded in every report."""
        return {
            'budgets': self.config_manager.get('budgets'),
            'tolerances': self.config_manager.get('tolerances'),
        }

    # Analyses

    def evaluate(self, f: PolyMap, x: Sequence[float]) -> np.ndarray:
        return f.evaluate(x)

    def rabier(self, f: PolyMap, x: Sequence[float]) -> RabierResult:
        return rabier_nu(f, x, self.rabier_budget())

    def tangency(self, f: PolyMap, tbar: Optional[Sequence[float]] = None) -> TangencyEstimate:
        return estimate_tangency_values(f, self.tangency_config(tbar), self.executor)

    def section(self, f: PolyMap, tbar: Sequence[float]) -> SectionProbeReport:
        return probe_bounded_section(f, tbar, self.section_budget(), self.executor)

    def properness(self, f: PolyMap, tbar: Sequence[float]) -> PropernessProbeReport:
        return probe_properness(f, tbar, self.properness_budget(), self.executor)

    def palais_smale(self, f: PolyMap, tbar: Sequence[float]) -> PalaisSmaleProbeReport:
        return probe_palais_smale(f, tbar, self.palais_smale_config(), self.executor)

    def newton(self, f: PolyMap) -> Dict[str, Any]:
        """Newton polytopes, convenience flags, faces at infinity and the Khovanskii check."""
        flags, convenient = is_convenient(f)
        result: Dict[str, Any] = {
            'polytopes': [newton_polytope(p).to_dict() for p in f.components],
            'convenient': flags,
            'all_convenient': convenient,
        }
        khovanskii: KhovanskiiResult = check_khovanskii(f, self.khovanskii_budget(), self.executor)
        result['khovanskii'] = khovanskii.to_dict()
        return result

    def find(self, f: PolyMap, tbar: Sequence[float], verify: bool = True) -> FindResult:
        """Pareto search at tbar; repeated calls with the same arguments reuse the result."""
        key = (f, tuple(float(t) for t in tbar), verify)
        if key not in self._found:
            self._found[key] = find_pareto_points(f, tbar, self.pareto_budget(verify), self.executor)
        return self._found[key]

    def candidates(self, f: PolyMap, found: Optional[FindResult] = None) -> CandidateValueSet:
        points = found.verified() if found is not None else None
        return candidate_pareto_values(f, self.candidate_config(), points, self.executor)

    def existence(self, f: PolyMap, tbar: Optional[Sequence[float]] = None) -> ExistenceReport:
        return existence_verdict(f, tbar, self.existence_config(), self.executor)
