"""
Sublevel probes for polypareto: bounded sections, properness and Palais-Smale evidence.

Every verdict here is budget-relative. ``bounded_likely`` and
``no_witness_found`` mean the search found nothing, not that nothing exists.
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares, minimize

from ..utils.sampling import ball_points, child_rngs, simplex_weights, sphere_directions
from ..utils.sphere_solver import minimize_on_sphere
from .polynomial import PolyMap
from .rabier import RabierBudget
from .tangency import (
    TangencySample,
    TangencyTrace,
    decays,
    limit_of,
    make_sample,
    parallel_map,
    sublevel_slack,
    sublevel_violation,
)

logger = logging.getLogger(__name__)

BOUNDED_LIKELY = "bounded_likely"
UNBOUNDED_WITNESS = "unbounded_witness"
EMPTY_SECTION = "empty_section"
INCONCLUSIVE = "inconclusive"

NOT_PROPER_WITNESS = "not_proper_witness"
NO_WITNESS_FOUND = "no_witness_found"

PS_VIOLATION_WITNESS = "ps_violation_witness"
WEAK_PS_VIOLATION_WITNESS = "weak_ps_violation_witness"

Objective = Callable[[np.ndarray], Tuple[float, np.ndarray]]


@dataclass
class SectionBudget:
    n_starts: int = 16
    R_max: float = 1e5
    iter_cap: int = 500
    divergence_threshold: float = -1e6
    penalty_scale: float = 1e4
    escape_factor: float = 1e3
    sweep_factor: float = 4.0
    sweep_iterations: int = 3000
    slack_rtol: float = 1e-6
    cluster_rtol: float = 1e-3
    grad_rtol: float = 1e-9
    seed: int = 0

    def sweep_radii(self) -> List[float]:
        """Geometric radii from 1 up to escape_factor * R_max."""
        cap = self.escape_factor * self.R_max
        radii = [1.0]
        while radii[-1] * self.sweep_factor <= cap:
            radii.append(radii[-1] * self.sweep_factor)
        return radii


@dataclass
class PropernessBudget:
    n_targets: int = 10
    n_image_samples: int = 400
    sample_radius: float = 3.0
    radius_start: float = 10.0
    radius_factor: float = 2.0
    R_max: float = 1e5
    max_iterations: int = 3000
    penalty_scale: float = 1e4
    witness_rtol: float = 1e-4
    slack_rtol: float = 1e-6
    cluster_rtol: float = 1e-3
    grad_rtol: float = 1e-9
    seed: int = 0

    def radii(self) -> List[float]:
        """Geometric schedule up to R_max whose last radius is at least R_max / 2."""
        radii = [self.radius_start]
        while radii[-1] * self.radius_factor <= self.R_max:
            radii.append(radii[-1] * self.radius_factor)
        if radii[-1] < self.R_max / 2:
            radii.append(self.R_max)
        return radii


@dataclass
class PalaisSmaleConfig:
    n_seeds: int = 8
    n_weights: int = 4
    radius_start: float = 10.0
    radius_factor: float = 2.0
    radius_steps: int = 12
    max_iterations: int = 3000
    penalty_scale: float = 1e4
    dependency_tol: float = 1e-6
    slack_rtol: float = 1e-6
    cluster_rtol: float = 1e-3
    grad_rtol: float = 1e-9
    seed: int = 0
    rabier: RabierBudget = field(default_factory=RabierBudget)

    def radii(self) -> np.ndarray:
        return self.radius_start * self.radius_factor ** np.arange(self.radius_steps)


@dataclass
class EscapeRecord:
    """Feasible points along which one component of f decreases."""
    component: int
    points: List[np.ndarray]
    values: List[np.ndarray]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "component": self.component,
            "points": [p.tolist() for p in self.points],
            "values": [v.tolist() for v in self.values],
        }


@dataclass
class SectionProbeReport:
    tbar: np.ndarray
    verdict: str
    witness: Optional[EscapeRecord] = None
    lower_envelope: Optional[np.ndarray] = None
    n_feasible: int = 0
    envelope_is_global: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tbar": self.tbar.tolist(),
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "lower_envelope": None if self.lower_envelope is None else self.lower_envelope.tolist(),
            "n_feasible": self.n_feasible,
            "envelope_is_global": self.envelope_is_global,
        }


@dataclass
class EscapeTrace:
    """Sphere continuation towards a fixed target value c."""
    target: np.ndarray
    source: str
    radii: List[float] = field(default_factory=list)
    points: List[np.ndarray] = field(default_factory=list)
    values: List[np.ndarray] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)

    @property
    def limit(self) -> Optional[np.ndarray]:
        return self.values[-1] if self.values else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": self.target.tolist(),
            "source": self.source,
            "radii": list(self.radii),
            "points": [p.tolist() for p in self.points],
            "values": [v.tolist() for v in self.values],
            "residuals": list(self.residuals),
        }


@dataclass
class PropernessProbeReport:
    tbar: np.ndarray
    verdict: str
    witness: Optional[EscapeTrace] = None
    n_targets: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tbar": self.tbar.tolist(),
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "n_targets": self.n_targets,
        }


@dataclass
class PalaisSmaleProbeReport:
    tbar: np.ndarray
    verdict: str
    nu_floor: Optional[float] = None
    witness: Optional[TangencyTrace] = None
    n_traces: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tbar": self.tbar.tolist(),
            "verdict": self.verdict,
            "nu_floor": self.nu_floor,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "n_traces": self.n_traces,
        }


def _as_tbar(f: PolyMap, tbar: Sequence[float]) -> np.ndarray:
    values = np.asarray(tbar, dtype=float).reshape(-1)
    if values.shape[0] != f.ncomponents:
        raise ValueError(f"tbar has {values.shape[0]} entries, the map has {f.ncomponents} components")
    if np.any(np.isnan(values)) or np.any(values == -np.inf):
        raise ValueError("tbar entries must be finite or +inf")
    return values


def penalty_coefficient(tbar: np.ndarray, scale: float) -> float:
    """scale * (1 + ||tbar||) over the finite entries."""
    finite = tbar[np.isfinite(tbar)]
    return scale * (1.0 + float(np.linalg.norm(finite)))


def penalized_objective(f: PolyMap, weight: np.ndarray, tbar: np.ndarray, penalty: float) -> Objective:
    """x -> <w, f(x)> + penalty * sum_j max(0, f_j(x) - tbar_j)^2 with its gradient."""
    bounded = np.isfinite(tbar)
    levels = np.where(bounded, tbar, 0.0)

    def objective(x: np.ndarray) -> Tuple[float, np.ndarray]:
        with np.errstate(over="ignore", invalid="ignore"):
            values = f.evaluate(x)
            excess = np.where(bounded, np.maximum(values - levels, 0.0), 0.0)
            value = float(weight @ values + penalty * (excess @ excess))
            gradient = f.jacobian(x).T @ (weight + 2.0 * penalty * excess)
        if not np.isfinite(value) or not np.all(np.isfinite(gradient)):
            return float("inf"), np.zeros_like(x)
        return value, gradient

    return objective


def restore_feasibility(f: PolyMap, x: np.ndarray, tbar: np.ndarray, max_evaluations: int) -> np.ndarray:
    """Gauss-Newton descent on the sublevel violation max(0, f_j - tbar_j)."""
    bounded = np.isfinite(tbar)
    if not bounded.any():
        return x
    levels = tbar[bounded]

    def residual(y: np.ndarray) -> np.ndarray:
        return np.maximum(f.evaluate(y)[bounded] - levels, 0.0)

    def jacobian(y: np.ndarray) -> np.ndarray:
        active = f.evaluate(y)[bounded] > levels
        return f.jacobian(y)[bounded] * active[:, None]

    try:
        result = least_squares(
            residual, x, jac=jacobian, method="trf",
            xtol=1e-15, ftol=1e-15, gtol=None, max_nfev=max_evaluations,
        )
    except ValueError as e:
        logger.debug(f"Feasibility restoration skipped: {e}")
        return x
    return result.x


def _is_feasible(values: np.ndarray, tbar: np.ndarray, slack: float) -> bool:
    return bool(np.all(np.isfinite(values))) and sublevel_violation(values, tbar) <= slack


def _local_minimum(objective: Objective, start: np.ndarray, iter_cap: int) -> Tuple[np.ndarray, float]:
    with np.errstate(over="ignore", invalid="ignore"):
        result = minimize(objective, start, jac=True, method="L-BFGS-B", options={"maxiter": iter_cap})
    return np.asarray(result.x, dtype=float), float(result.fun)


def _sweep_component(
    f: PolyMap,
    component: int,
    direction: np.ndarray,
    tbar: np.ndarray,
    penalty: float,
    slack: float,
    budget: SectionBudget,
) -> List[Tuple[np.ndarray, np.ndarray, bool]]:
    """Penalised minimisation of f_i on growing spheres, warm-started."""
    weight = np.zeros(f.ncomponents)
    weight[component] = 1.0
    objective = penalized_objective(f, weight, tbar, penalty)

    records: List[Tuple[np.ndarray, np.ndarray, bool]] = []
    x = direction
    for radius in budget.sweep_radii():
        solution = minimize_on_sphere(
            objective, x, radius, max_iterations=budget.sweep_iterations, grad_tol=budget.grad_rtol
        )
        if not np.all(np.isfinite(solution.x)):
            break
        x = solution.x
        values = f.evaluate(x)
        feasible = _is_feasible(values, tbar, slack)
        records.append((x, values, feasible))
        if feasible and values[component] < budget.divergence_threshold:
            break
    return records


def probe_bounded_section(
    f: PolyMap,
    tbar: Sequence[float],
    budget: Optional[SectionBudget] = None,
    executor: Optional[Executor] = None,
) -> SectionProbeReport:
    """
    Search for an escape of the section of f(R^n) at tbar.

    Each component f_i is minimised under the sublevel penalty from starts in
    balls of growing radius up to R_max, with a feasibility restoration when
    the penalty solution lands outside the sublevel. A sphere sweep then
    follows the best direction out to escape_factor * R_max.

    Args:
        f: Polynomial map
        tbar: Sublevel, entries finite or +inf
        budget: Search budget
        executor: Optional executor for the multistart runs

    Returns:
        SectionProbeReport with the verdict, lower envelope and any escape witness
    """
    budget = budget or SectionBudget()
    if budget.n_starts < 1 or budget.R_max <= 0 or budget.iter_cap < 1:
        raise ValueError("Section budget must be positive")
    level = _as_tbar(f, tbar)
    m, n = f.ncomponents, f.nvars
    slack = sublevel_slack(level, budget.slack_rtol)
    penalty = penalty_coefficient(level, budget.penalty_scale)

    rngs = child_rngs(budget.seed, budget.n_starts)
    radii = np.geomspace(1.0, budget.R_max, budget.n_starts)
    starts = [ball_points(n, 1, float(r), rng)[0] for r, rng in zip(radii, rngs)]
    tasks = [(i, k) for i in range(m) for k in range(budget.n_starts)]

    def run(task: Tuple[int, int]) -> Tuple[np.ndarray, float, np.ndarray, bool]:
        i, k = task
        weight = np.zeros(m)
        weight[i] = 1.0
        x, objective_value = _local_minimum(penalized_objective(f, weight, level, penalty), starts[k], budget.iter_cap)
        candidate = x
        values = f.evaluate(candidate)
        if not _is_feasible(values, level, slack):
            candidate = restore_feasibility(f, x, level, budget.iter_cap)
            values = f.evaluate(candidate)
        return candidate, objective_value, values, _is_feasible(values, level, slack)

    results = parallel_map(run, tasks, executor)

    envelope = np.full(m, np.inf)
    n_feasible = 0
    witness: Optional[EscapeRecord] = None
    decreasing = False
    for i in range(m):
        component_runs = [results[j] for j, task in enumerate(tasks) if task[0] == i]
        for x, _, values, feasible in component_runs:
            if feasible:
                n_feasible += 1
                envelope[i] = min(envelope[i], values[i])
                if witness is None and values[i] < budget.divergence_threshold:
                    witness = EscapeRecord(component=i, points=[x], values=[values])

        best_x = min(component_runs, key=lambda r: r[1])[0]
        if not np.all(np.isfinite(best_x)) or np.linalg.norm(best_x) == 0.0:
            best_x = sphere_directions(n, 1, np.random.default_rng(budget.seed))[0]
        sweep = _sweep_component(f, i, best_x, level, penalty, slack, budget)
        feasible_sweep = [(x, values) for x, values, feasible in sweep if feasible]
        n_feasible += len(feasible_sweep)
        for _, values in feasible_sweep:
            envelope[i] = min(envelope[i], values[i])
        if witness is None and feasible_sweep and feasible_sweep[-1][1][i] < budget.divergence_threshold:
            witness = EscapeRecord(
                component=i,
                points=[x for x, _ in feasible_sweep],
                values=[values for _, values in feasible_sweep],
            )
        if len(sweep) >= 2 and sweep[-1][2] and sweep[-2][2]:
            last, previous = sweep[-1][1][i], sweep[-2][1][i]
            if last < previous - budget.cluster_rtol * (1.0 + abs(previous)):
                decreasing = True

    if witness is not None:
        verdict = UNBOUNDED_WITNESS
    elif n_feasible == 0:
        verdict = EMPTY_SECTION
    elif decreasing:
        verdict = INCONCLUSIVE
    else:
        verdict = BOUNDED_LIKELY

    report = SectionProbeReport(
        tbar=level,
        verdict=verdict,
        witness=witness,
        lower_envelope=None if n_feasible == 0 else envelope,
        n_feasible=n_feasible,
    )
    logger.info(f"Section probe at tbar={level.tolist()}: {verdict} ({n_feasible} feasible points)")
    return report


def _residual_objective(f: PolyMap, target: np.ndarray) -> Objective:
    def objective(x: np.ndarray) -> Tuple[float, np.ndarray]:
        with np.errstate(over="ignore", invalid="ignore"):
            r = f.evaluate(x) - target
            value = float(r @ r)
            gradient = 2.0 * (f.jacobian(x).T @ r)
        if not np.isfinite(value) or not np.all(np.isfinite(gradient)):
            return float("inf"), np.zeros_like(x)
        return value, gradient
    return objective


def _follow_target(
    f: PolyMap,
    target: np.ndarray,
    source: str,
    start: np.ndarray,
    tbar: np.ndarray,
    slack: float,
    budget: PropernessBudget,
) -> Optional[EscapeTrace]:
    """Keep f(x) = target on growing spheres; None once the residual or the sublevel breaks."""
    tolerance = budget.witness_rtol * (1.0 + float(np.linalg.norm(target)))
    objective = _residual_objective(f, target)
    trace = EscapeTrace(target=target, source=source)

    x = start
    for radius in budget.radii():
        solution = minimize_on_sphere(
            objective, x, radius, max_iterations=budget.max_iterations, grad_tol=budget.grad_rtol
        )
        values = f.evaluate(solution.x)
        residual = float(np.linalg.norm(values - target))
        if not np.isfinite(residual) or residual > tolerance or not _is_feasible(values, tbar, slack):
            logger.debug(f"Target {target.tolist()} ({source}) left at radius {radius:g}")
            return None
        x = solution.x
        trace.radii.append(float(radius))
        trace.points.append(x)
        trace.values.append(values)
        trace.residuals.append(residual)

    last = trace.values[-1]
    closeness = budget.cluster_rtol * (1.0 + float(np.linalg.norm(last)))
    if any(np.linalg.norm(v - last) > closeness for v in trace.values[-3:]):
        return None
    return trace


def properness_targets(
    f: PolyMap,
    tbar: np.ndarray,
    budget: PropernessBudget,
) -> List[Tuple[np.ndarray, str, np.ndarray]]:
    """
    Candidate limit values c <= tbar with a starting point for each.

    Penalised sphere minima of each component at the first radius come
    first, then the n_targets lowest feasible image samples.
    """
    n, m = f.nvars, f.ncomponents
    slack = sublevel_slack(tbar, budget.slack_rtol)
    penalty = penalty_coefficient(tbar, budget.penalty_scale)
    image_rng, direction_rng = child_rngs(budget.seed, 2)
    radius = budget.radii()[0]

    targets: List[Tuple[np.ndarray, str, np.ndarray]] = []
    directions = sphere_directions(n, m, direction_rng)
    for i in range(m):
        weight = np.zeros(m)
        weight[i] = 1.0
        solution = minimize_on_sphere(
            penalized_objective(f, weight, tbar, penalty), directions[i], radius,
            max_iterations=budget.max_iterations, grad_tol=budget.grad_rtol,
        )
        values = f.evaluate(solution.x)
        if _is_feasible(values, tbar, slack):
            targets.append((values, "sphere_minimum", solution.x))

    X = ball_points(n, budget.n_image_samples, budget.sample_radius, image_rng)
    F = f.evaluate_many(X)
    feasible = np.array([_is_feasible(row, tbar, slack) for row in F], dtype=bool)
    order = [int(k) for k in np.argsort(F.sum(axis=1), kind="stable") if feasible[k]]
    for k in order[: budget.n_targets]:
        start = X[k] if np.linalg.norm(X[k]) > 0.0 else np.eye(n)[0]
        targets.append((F[k].copy(), "image_sample", start))
    return targets


def probe_properness(
    f: PolyMap,
    tbar: Sequence[float],
    budget: Optional[PropernessBudget] = None,
    executor: Optional[Executor] = None,
) -> PropernessProbeReport:
    """
    Look for a convergent escape inside the sublevel region.

    For every target value c, ||f(x) - c||^2 is minimised on spheres along
    the radius schedule. A target whose residual stays within
    witness_rtol * (1 + ||c||) up to the last radius, with every value
    inside the sublevel, gives a non-properness witness.
    """
    budget = budget or PropernessBudget()
    if budget.n_targets < 1 or budget.n_image_samples < 1 or budget.R_max <= budget.radius_start:
        raise ValueError("Properness budget must be positive with R_max above the first radius")
    level = _as_tbar(f, tbar)
    slack = sublevel_slack(level, budget.slack_rtol)

    targets = properness_targets(f, level, budget)
    if not targets:
        logger.info(f"Properness probe at tbar={level.tolist()}: empty section")
        return PropernessProbeReport(tbar=level, verdict=EMPTY_SECTION)

    def follow(item: Tuple[np.ndarray, str, np.ndarray]) -> Optional[EscapeTrace]:
        target, source, start = item
        return _follow_target(f, target, source, start, level, slack, budget)

    traces = parallel_map(follow, targets, executor)
    witness = next((t for t in traces if t is not None), None)
    verdict = NOT_PROPER_WITNESS if witness is not None else NO_WITNESS_FOUND
    logger.info(f"Properness probe at tbar={level.tolist()}: {verdict} ({len(targets)} targets)")
    return PropernessProbeReport(tbar=level, verdict=verdict, witness=witness, n_targets=len(targets))


def _penalized_trace(
    f: PolyMap,
    start: np.ndarray,
    weight: np.ndarray,
    tbar: np.ndarray,
    penalty: float,
    slack: float,
    config: PalaisSmaleConfig,
) -> List[TangencySample]:
    objective = penalized_objective(f, weight, tbar, penalty)
    samples: List[TangencySample] = []
    x = start
    for radius in config.radii():
        solution = minimize_on_sphere(
            objective, x, float(radius), max_iterations=config.max_iterations, grad_tol=config.grad_rtol
        )
        if not np.all(np.isfinite(solution.x)):
            break
        sample = make_sample(f, solution.x, config.rabier)
        if not _is_feasible(sample.fvalue, tbar, slack):
            break
        samples.append(sample)
        x = solution.x
    return samples


def probe_palais_smale(
    f: PolyMap,
    tbar: Sequence[float],
    config: Optional[PalaisSmaleConfig] = None,
    executor: Optional[Executor] = None,
) -> PalaisSmaleProbeReport:
    """
    Evidence for the Palais-Smale conditions at tbar.

    Weighted sphere minimisers under the sublevel penalty are traced along the
    radius schedule. A trace that stays feasible, converges in value and has
    nu decaying is a violation witness; decay of ||x|| * nu alone is a witness
    for the weak condition only.

    Returns:
        PalaisSmaleProbeReport; nu_floor is the smallest nu over all feasible
        samples (None when none was feasible)
    """
    config = config or PalaisSmaleConfig()
    level = _as_tbar(f, tbar)
    slack = sublevel_slack(level, config.slack_rtol)
    penalty = penalty_coefficient(level, config.penalty_scale)
    steps = len(config.radii())

    rng = np.random.default_rng(config.seed)
    seeds = sphere_directions(f.nvars, config.n_seeds, rng)
    weights = simplex_weights(f.ncomponents, config.n_weights, config.seed)
    pairs = [(si, wi) for si in range(len(seeds)) for wi in range(len(weights))]

    def run(pair: Tuple[int, int]) -> TangencyTrace:
        si, wi = pair
        samples = _penalized_trace(
            f, seeds[si] * config.radius_start, weights[wi], level, penalty, slack, config
        )
        for sample in samples:
            sample.weight_index, sample.seed_index = wi, si
        return TangencyTrace(samples=samples, weight=weights[wi])

    traces = parallel_map(run, pairs, executor)

    nu_values = [s.nu for t in traces for s in t.samples]
    nu_floor = min(nu_values) if nu_values else None

    strong: Optional[TangencyTrace] = None
    weak: Optional[TangencyTrace] = None
    for trace in traces:
        if len(trace.samples) < steps:
            continue
        trace.limit_estimate = limit_of(trace.samples, config.cluster_rtol)
        if trace.limit_estimate is None:
            continue
        if decays([s.nu for s in trace.samples], config.dependency_tol):
            trace.classification.append(PS_VIOLATION_WITNESS)
            strong = strong or trace
        if decays([s.nu_scaled for s in trace.samples], config.dependency_tol):
            trace.classification.append(WEAK_PS_VIOLATION_WITNESS)
            weak = weak or trace

    # ||x|| nu -> 0 forces nu -> 0, so a weak witness breaks both conditions.
    if weak is not None:
        verdict, witness = WEAK_PS_VIOLATION_WITNESS, weak
    elif strong is not None:
        verdict, witness = PS_VIOLATION_WITNESS, strong
    else:
        verdict, witness = NO_WITNESS_FOUND, None

    logger.info(f"Palais-Smale probe at tbar={level.tolist()}: {verdict} (nu floor {nu_floor})")
    return PalaisSmaleProbeReport(
        tbar=level, verdict=verdict, nu_floor=nu_floor, witness=witness, n_traces=len(traces)
    )
