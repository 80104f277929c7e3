"""
Pareto values and solutions for polypareto.

Critical values and tangency values at infinity together contain every
(weak) Pareto value. This module samples both, filters them by dominance,
searches for attained Pareto points by scalarisation and assembles
existence verdicts from the sublevel probes and the Newton certificate.
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares, minimize

from ..utils.linalg import rank_tolerance
from ..utils.sampling import box_points, child_rngs, cluster_points, relative_tolerance, simplex_weights
from .newton import (
    DEGENERATE,
    DimensionUnsupported,
    KhovanskiiBudget,
    KhovanskiiResult,
    check_khovanskii,
    is_convenient,
)
from .polynomial import PolyMap
from .rabier import rabier_from_jacobian
from .sublevel import (
    BOUNDED_LIKELY,
    NO_WITNESS_FOUND,
    PalaisSmaleConfig,
    PropernessBudget,
    SectionBudget,
    penalized_objective,
    penalty_coefficient,
    probe_bounded_section,
    probe_palais_smale,
    probe_properness,
)
from .tangency import TangencyConfig, ValueCluster, estimate_tangency_values, parallel_map, sublevel_slack, sublevel_violation

logger = logging.getLogger(__name__)

PARETO_VERIFIED_LOCAL = "pareto_verified_local"
WEAK_ONLY = "weak_only"
UNVERIFIED = "unverified"

EXISTS_WITH_WITNESS = "exists_with_witness"
CERTIFICATE_PLUS_BOUNDED_SECTION = "certificate_plus_bounded_section"
NO_CONCLUSION = "no_conclusion"

ATTAINED_PARETO_POINT = "attained_pareto_point"
NEWTON_CERTIFICATE = "newton_certificate"
SUBLEVEL_CONDITIONS = "sublevel_conditions"
GLOBAL_CONDITIONS = "global_conditions"
NO_THEOREM = "none"

# Points this close to the search box boundary are artefacts of the box.
_BOUNDARY_RTOL = 1e-6


class DegenerateDimension(Exception):
    """Raised when n <= m, where every value may be critical."""
    pass


# ---------------------------------------------------------------------------
# Dominance
# ---------------------------------------------------------------------------

def dominates(p: Sequence[float], q: Sequence[float], tol: float = 0.0) -> bool:
    """p <= q componentwise (up to tol) with at least one component smaller by more than tol."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    return bool(np.all(p <= q + tol) and np.any(p < q - tol))


def strictly_dominates(p: Sequence[float], q: Sequence[float], tol: float = 0.0) -> bool:
    """Every component of p smaller than the one of q by more than tol."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    return bool(np.all(p < q - tol))


def nondominated_mask(points: Sequence[Sequence[float]], reference: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Flags for the points that no other point dominates.

    Args:
        points: Values in R^m
        reference: Extra values that may dominate but are not flagged themselves

    Returns:
        Boolean array, one entry per point
    """
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return np.zeros(0, dtype=bool)
    pool = P if reference is None or len(reference) == 0 else np.vstack([P, reference])
    mask = np.ones(len(P), dtype=bool)
    for i, p in enumerate(P):
        better = np.all(pool <= p, axis=1) & np.any(pool < p, axis=1)
        mask[i] = not better.any()
    return mask


def nondominated_filter(points: Sequence[Sequence[float]]) -> List[np.ndarray]:
    """The points not dominated by any other point, in their original order."""
    mask = nondominated_mask(points)
    return [np.asarray(p, dtype=float) for p, keep in zip(points, mask) if keep]


# ---------------------------------------------------------------------------
# Critical values
# ---------------------------------------------------------------------------

@dataclass
class CriticalBudget:
    n_starts: int = 32
    box_radius: float = 3.0
    iter_cap: int = 500
    rank_rtol: float = 1e-6
    cluster_rtol: float = 1e-3
    seed: int = 0


@dataclass
class CriticalValue:
    """A cluster of sampled critical values with one preimage."""
    center: np.ndarray
    count: int
    preimage: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {"center": self.center.tolist(), "count": self.count, "preimage": self.preimage.tolist()}


def _singular_objective(f: PolyMap):
    """x -> (sigma_min(Df(x))^2, gradient) for m <= n."""
    m = f.ncomponents

    def objective(x: np.ndarray) -> Tuple[float, np.ndarray]:
        J = f.jacobian(x)
        if not np.all(np.isfinite(J)):
            return float("inf"), np.zeros_like(x)
        U, s, Vt = np.linalg.svd(J)
        sigma = float(s[m - 1])
        u, v = U[:, m - 1], Vt[m - 1]
        direction = sum(u[i] * (f.hessian(i, x) @ v) for i in range(m))
        return sigma * sigma, 2.0 * sigma * direction

    return objective


def _critical_point(f: PolyMap, start: np.ndarray, budget: CriticalBudget) -> Optional[np.ndarray]:
    bounds = [(-budget.box_radius, budget.box_radius)] * f.nvars
    if f.ncomponents == 1:
        try:
            result = least_squares(
                lambda x: f.jacobian(x)[0], start,
                jac=lambda x: f.hessian(0, x), method="trf",
                xtol=1e-15, ftol=1e-15, gtol=None, max_nfev=budget.iter_cap,
            )
        except ValueError:
            return None
        x = np.asarray(result.x, dtype=float)
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            result = minimize(
                _singular_objective(f), start, jac=True, method="L-BFGS-B", bounds=bounds,
                options={"maxiter": budget.iter_cap, "ftol": 1e-15, "gtol": 1e-12},
            )
        x = np.asarray(result.x, dtype=float)

    J = f.jacobian(x)
    if not np.all(np.isfinite(J)):
        return None
    sigma = float(np.linalg.svd(J, compute_uv=False)[f.ncomponents - 1]) if f.ncomponents > 1 else float(np.linalg.norm(J))
    if sigma > rank_tolerance(J, budget.rank_rtol):
        return None
    return x


def sample_critical_values(
    f: PolyMap,
    budget: Optional[CriticalBudget] = None,
    extra_starts: Optional[Sequence[np.ndarray]] = None,
    executor: Optional[Executor] = None,
) -> List[CriticalValue]:
    """
    Sample the critical values K_0(f) over a box.

    For m = 1 the gradient system is solved by Gauss-Newton with the exact
    Hessian; otherwise sigma_min(Df)^2 is minimised by L-BFGS-B in the box.
    Points whose smallest singular value passes the rank tolerance are kept
    and their values clustered.

    Raises:
        DegenerateDimension: If n <= m
    """
    budget = budget or CriticalBudget()
    if f.nvars <= f.ncomponents:
        raise DegenerateDimension(
            f"n = {f.nvars} <= m = {f.ncomponents}: critical values are not sampled"
        )
    rng = np.random.default_rng(budget.seed)
    starts = list(box_points(f.nvars, budget.n_starts, budget.box_radius, rng))
    starts.extend(np.asarray(s, dtype=float) for s in (extra_starts or []))

    found = [x for x in parallel_map(lambda s: _critical_point(f, s, budget), starts, executor) if x is not None]
    values = [f.evaluate(x) for x in found]
    clusters = cluster_points(values, relative_tolerance(budget.cluster_rtol))
    result = [CriticalValue(center=c.center, count=c.count, preimage=found[c.members[0]]) for c in clusters]
    logger.info(f"Critical values: {len(found)} critical points in {len(result)} clusters")
    return result


# ---------------------------------------------------------------------------
# Pareto point search
# ---------------------------------------------------------------------------

@dataclass
class ParetoBudget:
    n_weights: int = 8
    n_starts: int = 8
    box_radius: float = 3.0
    verify_samples: int = 2000
    n_epsilon_levels: int = 8
    improvement_starts: int = 4
    iter_cap: int = 500
    penalty_scale: float = 1e4
    slack_rtol: float = 1e-6
    verify_rtol: float = 1e-7
    cluster_rtol: float = 1e-3
    seed: int = 0


@dataclass
class ParetoPoint:
    x: np.ndarray
    value: np.ndarray
    kind: str
    source: str = "weighted_sum"

    def to_dict(self) -> Dict[str, Any]:
        return {"x": self.x.tolist(), "value": self.value.tolist(), "kind": self.kind, "source": self.source}


@dataclass
class FindResult:
    points: List[ParetoPoint] = field(default_factory=list)
    observed_infimum: Optional[np.ndarray] = None
    n_candidates: int = 0
    tbar: Optional[np.ndarray] = None

    def verified(self) -> List[ParetoPoint]:
        return [p for p in self.points if p.kind == PARETO_VERIFIED_LOCAL]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [p.to_dict() for p in self.points],
            "observed_infimum": None if self.observed_infimum is None else self.observed_infimum.tolist(),
            "n_candidates": self.n_candidates,
            "tbar": None if self.tbar is None else self.tbar.tolist(),
        }


def _level_constraint(f: PolyMap, levels: np.ndarray) -> List[Dict[str, Any]]:
    """SLSQP inequality f_j(x) <= levels_j over the finite levels."""
    bounded = np.isfinite(levels)
    if not bounded.any():
        return []
    finite = levels[bounded]
    return [{
        "type": "ineq",
        "fun": lambda x: finite - f.evaluate(x)[bounded],
        "jac": lambda x: -f.jacobian(x)[bounded],
    }]


def _slsqp(f: PolyMap, objective, x0: np.ndarray, levels: np.ndarray, bounds, iter_cap: int) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        result = minimize(
            objective, x0, jac=True, method="SLSQP", bounds=bounds,
            constraints=_level_constraint(f, levels), options={"maxiter": iter_cap, "ftol": 1e-12},
        )
    x = np.asarray(result.x, dtype=float)
    return x if np.all(np.isfinite(x)) else x0


def _linear_objective(f: PolyMap, weight: np.ndarray):
    def objective(x: np.ndarray) -> Tuple[float, np.ndarray]:
        return float(weight @ f.evaluate(x)), f.jacobian(x).T @ weight
    return objective


def improvement_search(
    f: PolyMap,
    x: np.ndarray,
    levels: np.ndarray,
    n_starts: int,
    rng: np.random.Generator,
    bounds=None,
    iter_cap: int = 500,
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Minimise sum_i f_i(y) subject to f(y) <= levels from x and perturbations of it.

    Returns:
        (y, f(y)) for every run with a finite result
    """
    ones = np.ones(f.ncomponents)
    scale = 0.1 * (1.0 + float(np.linalg.norm(x)))
    starts = [x] + [x + scale * rng.standard_normal(x.shape[0]) for _ in range(max(0, n_starts - 1))]
    if bounds is not None:
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        starts = [np.clip(s, lo, hi) for s in starts]
    results = []
    for start in starts:
        y = _slsqp(f, _linear_objective(f, ones), start, levels, bounds, iter_cap)
        value = f.evaluate(y)
        if np.all(np.isfinite(value)):
            results.append((y, value))
    return results


def _on_boundary(x: np.ndarray, box_radius: float) -> bool:
    return bool(np.any(np.abs(x) >= box_radius * (1.0 - _BOUNDARY_RTOL)))


def verify_point(
    f: PolyMap,
    x: np.ndarray,
    value: np.ndarray,
    others: Sequence[np.ndarray],
    budget: ParetoBudget,
    rng: np.random.Generator,
) -> Tuple[str, List[np.ndarray]]:
    """
    Classify a candidate by dominance against box samples, other candidates and an improvement search.

    Returns:
        (kind, evaluated values) where kind is pareto_verified_local,
        weak_only or "dominated"
    """
    tol = budget.verify_rtol * (1.0 + float(np.linalg.norm(value)))
    samples = f.evaluate_many(box_points(f.nvars, budget.verify_samples, budget.box_radius, rng))
    samples = samples[np.all(np.isfinite(samples), axis=1)]
    bounds = [(-budget.box_radius, budget.box_radius)] * f.nvars
    improved = improvement_search(f, x, value, budget.improvement_starts, rng, bounds, budget.iter_cap)
    pool = list(samples) + list(others) + [v for _, v in improved]

    weak = False
    for q in pool:
        if strictly_dominates(q, value, tol):
            return "dominated", list(samples) + [v for _, v in improved]
        if dominates(q, value, tol):
            weak = True
    kind = WEAK_ONLY if weak else PARETO_VERIFIED_LOCAL
    return kind, list(samples) + [v for _, v in improved]


def _epsilon_levels(
    values: List[np.ndarray],
    tbar: np.ndarray,
    budget: ParetoBudget,
) -> List[Tuple[int, np.ndarray]]:
    """(objective index, level vector) pairs spanning observed minima up to tbar."""
    m = tbar.shape[0]
    if m < 2 or not values or budget.n_epsilon_levels < 1:
        return []
    V = np.array(values)
    lo = V.min(axis=0)
    hi = np.where(np.isfinite(tbar), tbar, V.max(axis=0))
    runs = []
    for k in range(m):
        for s in np.linspace(0.0, 1.0, budget.n_epsilon_levels):
            levels = lo + s * (hi - lo)
            levels[k] = tbar[k]
            runs.append((k, levels))
    return runs


def find_pareto_points(
    f: PolyMap,
    tbar: Sequence[float],
    budget: Optional[ParetoBudget] = None,
    executor: Optional[Executor] = None,
) -> FindResult:
    """
    Search for attained Pareto points with f(x) <= tbar.

    Candidates come from weighted sums with strictly positive weights
    (penalised L-BFGS-B, then an SLSQP polish under f <= tbar) and from
    epsilon-constraint runs. Infeasible candidates and those on the search box
    boundary are dropped; the rest are verified unless verify_samples is 0.

    Args:
        f: Polynomial map
        tbar: Sublevel, entries finite or +inf
        budget: Search budget
        executor: Optional executor for the multistart runs

    Returns:
        FindResult; an empty point list means nothing was found at this budget
    """
    budget = budget or ParetoBudget()
    if budget.n_weights < 1 or budget.n_starts < 1 or budget.box_radius <= 0:
        raise ValueError("Pareto budget must be positive")
    level = np.asarray(tbar, dtype=float).reshape(-1)
    if level.shape[0] != f.ncomponents:
        raise ValueError(f"tbar has {level.shape[0]} entries, the map has {f.ncomponents} components")
    m, n = f.ncomponents, f.nvars
    slack = sublevel_slack(level, budget.slack_rtol)
    penalty = penalty_coefficient(level, budget.penalty_scale)
    bounds = [(-budget.box_radius, budget.box_radius)] * n

    if m == 1:
        weights = np.ones((1, 1))
    else:
        weights = simplex_weights(m, budget.n_weights, budget.seed, include_vertices=False)
        weights = weights[np.all(weights > 0.0, axis=1)]
    start_rng, epsilon_rng, verify_rng = child_rngs(budget.seed, 3)
    starts = box_points(n, budget.n_starts, budget.box_radius, start_rng)
    tasks = [(wi, si) for wi in range(len(weights)) for si in range(len(starts))]

    def weighted_run(task: Tuple[int, int]) -> np.ndarray:
        wi, si = task
        with np.errstate(over="ignore", invalid="ignore"):
            result = minimize(
                penalized_objective(f, weights[wi], level, penalty), starts[si], jac=True,
                method="L-BFGS-B", bounds=bounds,
                options={"maxiter": budget.iter_cap, "ftol": 1e-15, "gtol": 1e-10},
            )
        return _slsqp(f, _linear_objective(f, weights[wi]), np.asarray(result.x, dtype=float), level, bounds, budget.iter_cap)

    raw: List[Tuple[np.ndarray, str]] = [(x, "weighted_sum") for x in parallel_map(weighted_run, tasks, executor)]

    feasible_values = [
        f.evaluate(x) for x, _ in raw
        if np.all(np.isfinite(f.evaluate(x))) and sublevel_violation(f.evaluate(x), level) <= slack
    ]
    epsilon_runs = _epsilon_levels(feasible_values, level, budget)
    epsilon_starts = box_points(n, len(epsilon_runs), budget.box_radius, epsilon_rng)

    def epsilon_run(item: Tuple[int, Tuple[int, np.ndarray]]) -> List[np.ndarray]:
        index, (k, levels) = item
        weight = np.zeros(m)
        weight[k] = 1.0
        excess = [max(0.0, sublevel_violation(f.evaluate(x), levels)) for x, _ in raw]
        closest = raw[int(np.argmin(excess))][0]
        return [
            _slsqp(f, _linear_objective(f, weight), start, levels, bounds, budget.iter_cap)
            for start in (closest, epsilon_starts[index])
        ]

    for xs in parallel_map(epsilon_run, list(enumerate(epsilon_runs)), executor):
        raw.extend((x, "epsilon_constraint") for x in xs)

    evaluated: List[np.ndarray] = []
    candidates: List[Tuple[np.ndarray, np.ndarray, str]] = []
    for x, source in raw:
        value = f.evaluate(x)
        if not np.all(np.isfinite(value)) or sublevel_violation(value, level) > slack:
            continue
        evaluated.append(value)
        if _on_boundary(x, budget.box_radius):
            continue
        if any(np.linalg.norm(x - c[0]) <= 1e-6 * (1.0 + np.linalg.norm(x)) for c in candidates):
            continue
        candidates.append((x, value, source))

    points: List[ParetoPoint] = []
    if budget.verify_samples == 0:
        points = [ParetoPoint(x, v, UNVERIFIED, s) for x, v, s in candidates]
    else:
        rngs = child_rngs(int(verify_rng.integers(2 ** 63)), max(1, len(candidates)))

        def verify(index: int) -> Tuple[str, List[np.ndarray]]:
            x, value, _ = candidates[index]
            others = [c[1] for j, c in enumerate(candidates) if j != index]
            return verify_point(f, x, value, others, budget, rngs[index])

        for (x, value, source), (kind, seen) in zip(candidates, parallel_map(verify, range(len(candidates)), executor)):
            evaluated.extend(v for v in seen if sublevel_violation(v, level) <= slack)
            if kind != "dominated":
                points.append(ParetoPoint(x, value, kind, source))

    infimum = np.min(np.array(evaluated), axis=0) if evaluated else None
    logger.info(
        f"Pareto search at tbar={level.tolist()}: {len(candidates)} candidates, "
        f"{sum(p.kind == PARETO_VERIFIED_LOCAL for p in points)} verified"
    )
    return FindResult(points=points, observed_infimum=infimum, n_candidates=len(candidates), tbar=level)


# ---------------------------------------------------------------------------
# Candidate value set
# ---------------------------------------------------------------------------

@dataclass
class CandidateConfig:
    critical: CriticalBudget = field(default_factory=CriticalBudget)
    tangency: TangencyConfig = field(default_factory=TangencyConfig)
    pareto: ParetoBudget = field(default_factory=ParetoBudget)


@dataclass
class CandidateValueSet:
    critical_values: List[CriticalValue]
    tangency_values: List[ValueCluster]
    nondominated: List[bool]
    image_values: List[np.ndarray] = field(default_factory=list)
    image_nondominated: List[bool] = field(default_factory=list)
    degenerate_dimension: bool = False

    @property
    def points(self) -> List[np.ndarray]:
        return [c.center for c in self.critical_values] + [c.center for c in self.tangency_values]

    @property
    def sources(self) -> List[str]:
        return ["critical"] * len(self.critical_values) + ["tangency"] * len(self.tangency_values)

    def nondominated_points(self) -> List[np.ndarray]:
        return [p for p, keep in zip(self.points, self.nondominated) if keep]

    def distance_to(self, value: Sequence[float]) -> float:
        """Distance from a value to the nearest candidate (inf when there is none)."""
        if not self.points:
            return float("inf")
        return float(min(np.linalg.norm(p - np.asarray(value, dtype=float)) for p in self.points))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "critical_values": [c.to_dict() for c in self.critical_values],
            "tangency_values": [c.to_dict() for c in self.tangency_values],
            "candidates": [
                {"value": p.tolist(), "source": s, "nondominated": bool(k), "image_nondominated": bool(g)}
                for p, s, k, g in zip(self.points, self.sources, self.nondominated, self.image_nondominated)
            ],
            "image_values": [v.tolist() for v in self.image_values],
            "degenerate_dimension": self.degenerate_dimension,
        }


def _image_dominators(
    f: PolyMap,
    preimages: List[Optional[np.ndarray]],
    points: List[np.ndarray],
    budget: ParetoBudget,
    executor: Optional[Executor],
) -> List[np.ndarray]:
    """Attained values that dominate a candidate, found by strict improvement from its preimage."""
    rngs = child_rngs(budget.seed + 1, max(1, len(points)))

    def search(index: int) -> Optional[np.ndarray]:
        x = preimages[index]
        if x is None:
            return None
        c = points[index]
        margin = budget.verify_rtol * (1.0 + float(np.linalg.norm(c)))
        for _, value in improvement_search(f, x, c - margin, budget.improvement_starts, rngs[index], None, budget.iter_cap):
            if dominates(value, c):
                return value
        return None

    return [v for v in parallel_map(search, range(len(points)), executor) if v is not None]


def candidate_pareto_values(
    f: PolyMap,
    config: Optional[CandidateConfig] = None,
    pareto_points: Optional[Sequence[ParetoPoint]] = None,
    executor: Optional[Executor] = None,
) -> CandidateValueSet:
    """
    Critical values and tangency values at infinity, flagged by dominance.

    Verified Pareto points, when given, seed the critical sampling with their
    preimages. The nondominated flags come from the pairwise scan of the
    candidates alone. Candidates still undominated after that scan get a
    strict improvement search from a preimage; attained values found there
    are kept as image_values, and image_nondominated repeats the scan with
    them as extra dominators.
    """
    config = config or CandidateConfig()
    degenerate = False
    try:
        extra = [p.x for p in (pareto_points or [])]
        critical = sample_critical_values(f, config.critical, extra_starts=extra, executor=executor)
    except DegenerateDimension as e:
        logger.warning(f"{e}")
        critical, degenerate = [], True

    estimate = estimate_tangency_values(f, config.tangency, executor)
    points = [c.center for c in critical] + [c.center for c in estimate.clusters]
    preimages: List[Optional[np.ndarray]] = [c.preimage for c in critical] + [
        estimate.traces[c.trace_indices[0]].samples[-1].x if c.trace_indices else None
        for c in estimate.clusters
    ]

    mask = nondominated_mask(points)
    open_indices = [i for i, keep in enumerate(mask) if keep]
    dominators = _image_dominators(
        f, [preimages[i] for i in open_indices], [points[i] for i in open_indices], config.pareto, executor
    )
    refined = nondominated_mask(points, np.array(dominators)) if dominators else mask

    result = CandidateValueSet(
        critical_values=critical,
        tangency_values=estimate.clusters,
        nondominated=[bool(k) for k in mask],
        image_values=dominators,
        image_nondominated=[bool(k) for k in refined],
        degenerate_dimension=degenerate,
    )
    logger.info(
        f"Candidate set: {len(points)} values, {int(np.sum(mask))} nondominated, "
        f"{int(np.sum(refined))} after the image search"
    )
    return result


# ---------------------------------------------------------------------------
# Existence verdicts
# ---------------------------------------------------------------------------

@dataclass
class ExistenceConfig:
    section: SectionBudget = field(default_factory=SectionBudget)
    properness: PropernessBudget = field(default_factory=PropernessBudget)
    palais_smale: PalaisSmaleConfig = field(default_factory=PalaisSmaleConfig)
    tangency: TangencyConfig = field(default_factory=TangencyConfig)
    khovanskii: KhovanskiiBudget = field(default_factory=KhovanskiiBudget)
    pareto: ParetoBudget = field(default_factory=ParetoBudget)
    n_image_samples: int = 100
    quantiles: Tuple[float, ...] = (0.5, 0.25, 0.1)
    global_route: bool = True
    seed: int = 0


@dataclass
class Evidence:
    kind: str
    verdict: str
    index: int = 0
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "verdict": self.verdict, "index": self.index, "data": self.data}


@dataclass
class ExistenceReport:
    tbar: Optional[np.ndarray]
    verdict: str
    basis: List[Evidence] = field(default_factory=list)
    theorem_path: str = NO_THEOREM
    witness: Optional[ParetoPoint] = None
    scanned: List[Dict[str, Any]] = field(default_factory=list)
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tbar": None if self.tbar is None else self.tbar.tolist(),
            "verdict": self.verdict,
            "theorem_path": self.theorem_path,
            "basis": [e.to_dict() for e in self.basis],
            "witness": None if self.witness is None else self.witness.to_dict(),
            "scanned": list(self.scanned),
            "seed": self.seed,
        }


def candidate_tbars(f: PolyMap, config: ExistenceConfig) -> List[np.ndarray]:
    """Image points nearest the componentwise quantiles of random evaluations in the box."""
    rng = np.random.default_rng(config.seed)
    X = box_points(f.nvars, config.n_image_samples, config.pareto.box_radius, rng)
    F = f.evaluate_many(X)
    F = F[np.all(np.isfinite(F), axis=1)]
    chosen: List[np.ndarray] = []
    for q in config.quantiles:
        target = np.quantile(F, q, axis=0)
        point = F[int(np.argmin(np.linalg.norm(F - target, axis=1)))]
        if not any(np.array_equal(point, c) for c in chosen):
            chosen.append(point.copy())
    return chosen


def _newton_evidence(f: PolyMap, budget: KhovanskiiBudget, executor: Optional[Executor]) -> Tuple[bool, Evidence]:
    flags, convenient = is_convenient(f)
    try:
        result: Optional[KhovanskiiResult] = check_khovanskii(f, budget, executor) if convenient else None
    except DimensionUnsupported as e:
        return False, Evidence("newton", "dimension_unsupported", data={"message": str(e), "convenient": flags})
    status = None if result is None else result.status
    certified = convenient and status is not None and status != DEGENERATE
    data: Dict[str, Any] = {"convenient": flags, "khovanskii_status": status}
    if result is not None:
        data["faces"] = len(result.reports)
    return certified, Evidence("newton", "certificate" if certified else "no_certificate", data=data)


def _linear_evidence(f: PolyMap) -> Optional[Evidence]:
    if f.max_degree() > 1:
        return None
    J = f.jacobian(np.zeros(f.nvars))
    if np.linalg.matrix_rank(J) < f.ncomponents:
        return None
    nu = rabier_from_jacobian(J).value
    return Evidence("linear_map", "independent", data={"nu": nu})


def _sublevel_evidence(
    f: PolyMap,
    tbar: np.ndarray,
    index: int,
    config: ExistenceConfig,
    executor: Optional[Executor],
) -> Tuple[bool, List[Evidence]]:
    """Properness, Palais-Smale and tangency evidence at tbar; True when all come back clean."""
    properness = probe_properness(f, tbar, config.properness, executor)
    palais_smale = probe_palais_smale(f, tbar, config.palais_smale, executor)
    tangency = estimate_tangency_values(
        f, _with_sublevel(config.tangency, tbar), executor
    )
    tangency_clean = tangency.is_empty() and tangency.n_started > 0 and tangency.n_lost == 0
    evidence = [
        Evidence("properness", properness.verdict, index, properness.to_dict()),
        Evidence("palais_smale", palais_smale.verdict, index, palais_smale.to_dict()),
        Evidence("tangency", "empty" if tangency.is_empty() else "nonempty", index, tangency.to_dict()),
    ]
    clean = (
        properness.verdict == NO_WITNESS_FOUND
        and palais_smale.verdict == NO_WITNESS_FOUND
        and tangency_clean
    )
    return clean, evidence


def _with_sublevel(config: TangencyConfig, tbar: np.ndarray) -> TangencyConfig:
    return replace(config, sublevel=tbar)


def _reverified(f: PolyMap, point: ParetoPoint, budget: ParetoBudget) -> bool:
    rng = np.random.default_rng(budget.seed + 1)
    kind, _ = verify_point(f, point.x, point.value, [], budget, rng)
    return kind == PARETO_VERIFIED_LOCAL


def existence_verdict(
    f: PolyMap,
    tbar: Optional[Sequence[float]] = None,
    config: Optional[ExistenceConfig] = None,
    executor: Optional[Executor] = None,
) -> ExistenceReport:
    """
    Decide, with evidence, whether the problem admits a Pareto solution.

    Each candidate tbar (the given one, or image points near quantiles of
    random evaluations) runs the section probe, the Pareto search and, when
    no point is verified, the sublevel probes. The first tbar with a verdict
    other than no_conclusion wins. Nonexistence is never claimed.
    """
    config = config or ExistenceConfig()
    tbars = [np.asarray(tbar, dtype=float).reshape(-1)] if tbar is not None else candidate_tbars(f, config)
    certified, newton = _newton_evidence(f, config.khovanskii, executor)
    base: List[Evidence] = [newton]
    linear = _linear_evidence(f)
    if linear is not None:
        base.append(linear)

    report = ExistenceReport(tbar=tbars[0] if tbars else None, verdict=NO_CONCLUSION, seed=config.seed)
    collected: List[Evidence] = list(base)
    for index, level in enumerate(tbars):
        section = probe_bounded_section(f, level, config.section, executor)
        evidence = [Evidence("section", section.verdict, index, section.to_dict())]

        found = find_pareto_points(f, level, config.pareto, executor)
        witness = next((p for p in found.verified() if _reverified(f, p, config.pareto)), None)
        evidence.append(Evidence(
            "pareto_search", "verified_point" if witness is not None else "none_verified", index, found.to_dict()
        ))

        verdict, path = NO_CONCLUSION, NO_THEOREM
        if witness is not None:
            verdict, path = EXISTS_WITH_WITNESS, ATTAINED_PARETO_POINT
            evidence.append(Evidence(
                "closedness", "attained", index,
                {"note": "the verified point lies in a bounded closed section of the image at tbar"},
            ))
        elif section.verdict == BOUNDED_LIKELY and certified:
            verdict, path = CERTIFICATE_PLUS_BOUNDED_SECTION, NEWTON_CERTIFICATE
        elif section.verdict == BOUNDED_LIKELY:
            clean, sublevel_evidence = _sublevel_evidence(f, level, index, config, executor)
            evidence.extend(sublevel_evidence)
            if clean:
                verdict, path = CERTIFICATE_PLUS_BOUNDED_SECTION, SUBLEVEL_CONDITIONS

        report.scanned.append({"tbar": level.tolist(), "verdict": verdict})
        collected.extend(evidence)
        if verdict != NO_CONCLUSION:
            report.tbar, report.verdict, report.theorem_path, report.witness = level, verdict, path, witness
            break
    else:
        if config.global_route:
            unrestricted = np.full(f.ncomponents, np.inf)
            index = len(tbars)
            section = probe_bounded_section(f, unrestricted, config.section, executor)
            collected.append(Evidence("section", section.verdict, index, section.to_dict()))
            if section.verdict == BOUNDED_LIKELY:
                clean, sublevel_evidence = _sublevel_evidence(f, unrestricted, index, config, executor)
                collected.extend(sublevel_evidence)
                if clean:
                    report.verdict, report.theorem_path = CERTIFICATE_PLUS_BOUNDED_SECTION, GLOBAL_CONDITIONS
                    report.tbar = unrestricted
            report.scanned.append({"tbar": unrestricted.tolist(), "verdict": report.verdict})

    report.basis = sorted(collected, key=lambda e: (e.kind, e.index))
    logger.info(f"Existence verdict: {report.verdict} via {report.theorem_path}")
    return report
