"""
Tangency variety membership, sphere stationary points and tangency values at infinity.

A point x lies in the tangency variety when the component gradients and the
position vector x are linearly dependent. Stationary points of weighted sums
<w, f> on spheres are such points; following them along a growing radius
schedule and clustering the limits of f gives an estimate of the tangency
values at infinity.
"""

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..utils.linalg import column_dependency
from ..utils.sampling import cluster_points, relative_tolerance, simplex_weights, sphere_directions
from ..utils.sphere_solver import minimize_on_sphere
from .polynomial import PolyMap
from .rabier import RabierBudget, rabier_from_jacobian

logger = logging.getLogger(__name__)

PS_WITNESS = "PS-witness"
WEAK_PS_WITNESS = "weakPS-witness"
TANGENCY_WITNESS = "tangency-witness"

# A decaying diagnostic ends at most this fraction of its starting value.
DECAY_RATIO = 0.01

T = TypeVar("T")
U = TypeVar("U")


class ZeroPoint(Exception):
    """Raised when the dependency measure is requested at the origin."""
    pass


class LostTrack(Exception):
    """Raised when continuation fails at some radius; carries the truncated trace."""

    def __init__(self, message: str, trace: "TangencyTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass
class TangencyConfig:
    n_seeds: int = 32
    n_weights: int = 8
    radius_start: float = 10.0
    radius_factor: float = 2.0
    radius_steps: int = 14
    max_iterations: int = 3000
    dependency_tol: float = 1e-6
    cluster_rtol: float = 1e-3
    slack_rtol: float = 1e-6
    grad_rtol: float = 1e-9
    sublevel: Optional[np.ndarray] = None
    seed: int = 0
    rabier: RabierBudget = field(default_factory=RabierBudget)

    def radii(self) -> np.ndarray:
        return self.radius_start * self.radius_factor ** np.arange(self.radius_steps)


@dataclass
class TangencySample:
    x: np.ndarray
    radius: float
    fvalue: np.ndarray
    dependency: float
    nu: float
    nu_scaled: float
    weight_index: int = 0
    seed_index: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": self.x.tolist(),
            "radius": self.radius,
            "fvalue": self.fvalue.tolist(),
            "dependency": self.dependency,
            "nu": self.nu,
            "nu_scaled": self.nu_scaled,
        }


@dataclass
class TangencyTrace:
    samples: List[TangencySample]
    weight: np.ndarray
    limit_estimate: Optional[np.ndarray] = None
    classification: List[str] = field(default_factory=list)

    @property
    def radii(self) -> List[float]:
        return [s.radius for s in self.samples]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weight": self.weight.tolist(),
            "limit_estimate": None if self.limit_estimate is None else self.limit_estimate.tolist(),
            "classification": list(self.classification),
            "samples": [s.to_dict() for s in self.samples],
        }


@dataclass
class ValueCluster:
    """Clustered limit value with the traces that produced it."""
    center: np.ndarray
    count: int
    trace_indices: List[int]
    min_nu: float
    min_nu_scaled: float
    classification: List[str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center": self.center.tolist(),
            "count": self.count,
            "trace_indices": list(self.trace_indices),
            "min_nu": self.min_nu,
            "min_nu_scaled": self.min_nu_scaled,
            "classification": list(self.classification),
        }


@dataclass
class TangencyEstimate:
    clusters: List[ValueCluster]
    traces: List[TangencyTrace]
    n_started: int
    n_lost: int
    sublevel: Optional[np.ndarray] = None

    @property
    def values(self) -> List[np.ndarray]:
        return [c.center for c in self.clusters]

    def is_empty(self) -> bool:
        return not self.clusters

    def to_dict(self, include_traces: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "clusters": [c.to_dict() for c in self.clusters],
            "n_started": self.n_started,
            "n_lost": self.n_lost,
            "n_traces": len(self.traces),
            "sublevel": None if self.sublevel is None else self.sublevel.tolist(),
        }
        if include_traces:
            data["traces"] = [t.to_dict() for t in self.traces]
        return data


def parallel_map(fn: Callable[[T], U], items: Iterable[T], executor: Optional[Executor] = None) -> List[U]:
    """Order-preserving map, on the executor when one is given."""
    if executor is None:
        return [fn(item) for item in items]
    return list(executor.map(fn, items))


def sublevel_slack(tbar: Optional[np.ndarray], rtol: float) -> float:
    """rtol * (1 + ||tbar||) over the finite components of tbar."""
    if tbar is None:
        return 0.0
    finite = np.asarray(tbar, dtype=float)
    finite = finite[np.isfinite(finite)]
    return rtol * (1.0 + float(np.linalg.norm(finite)))


def sublevel_violation(values: np.ndarray, tbar: Optional[np.ndarray]) -> float:
    """Largest componentwise excess of values over tbar (0 when inside)."""
    if tbar is None:
        return 0.0
    excess = np.asarray(values, dtype=float) - np.asarray(tbar, dtype=float)
    excess = np.where(np.isnan(excess), np.inf, excess)
    return float(max(0.0, np.max(excess)))


def dependency_measure(f: PolyMap, x: Sequence[float]) -> float:
    """
    Smallest singular value of [grad f_1 ... grad f_m | x/||x||] with gradient
    columns scaled by 1/max(1, ||grad f_i||).

    Raises:
        ZeroPoint: If x is the origin
    """
    point = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(point))
    if norm == 0.0:
        raise ZeroPoint("the dependency measure is undefined at x = 0")
    J = f.jacobian(point)
    scales = np.maximum(1.0, np.linalg.norm(J, axis=1))
    columns = np.column_stack([J.T / scales, point / norm])
    return column_dependency(columns)


def make_sample(
    f: PolyMap,
    x: np.ndarray,
    rabier: Optional[RabierBudget] = None,
    weight_index: int = 0,
    seed_index: int = 0,
) -> TangencySample:
    radius = float(np.linalg.norm(x))
    nu = rabier_from_jacobian(f.jacobian(x), rabier).value
    return TangencySample(
        x=x,
        radius=radius,
        fvalue=f.evaluate(x),
        dependency=dependency_measure(f, x),
        nu=nu,
        nu_scaled=radius * nu,
        weight_index=weight_index,
        seed_index=seed_index,
    )


def weighted_objective(f: PolyMap, weight: np.ndarray) -> Callable[[np.ndarray], Tuple[float, np.ndarray]]:
    """x -> (<w, f(x)>, J(x)^T w)."""
    def objective(x: np.ndarray) -> Tuple[float, np.ndarray]:
        return float(weight @ f.evaluate(x)), f.jacobian(x).T @ weight
    return objective


def _solve_on_sphere(
    f: PolyMap,
    start: np.ndarray,
    radius: float,
    weight: np.ndarray,
    config: TangencyConfig,
    weight_index: int,
    seed_index: int,
) -> Optional[TangencySample]:
    solution = minimize_on_sphere(
        weighted_objective(f, weight),
        start,
        radius,
        max_iterations=config.max_iterations,
        grad_tol=config.grad_rtol,
    )
    if not solution.converged or not np.all(np.isfinite(solution.x)):
        return None
    sample = make_sample(f, solution.x, config.rabier, weight_index, seed_index)
    if not np.isfinite(sample.dependency) or sample.dependency > config.dependency_tol:
        return None
    return sample


def sphere_stationary_points(
    f: PolyMap,
    R: float,
    seeds: Sequence[np.ndarray],
    weights: Sequence[np.ndarray],
    config: Optional[TangencyConfig] = None,
    executor: Optional[Executor] = None,
) -> List[TangencySample]:
    """
    Stationary points of <w, f> on the sphere of radius R.

    Runs one sphere-constrained minimisation per (seed, weight) pair from
    seed * R. Only converged runs whose point passes the dependency threshold
    are returned, ordered by (seed index, weight index).
    """
    if R <= 0:
        raise ValueError(f"Radius must be positive, got {R}")
    if len(seeds) == 0 or len(weights) == 0:
        raise ValueError("At least one seed and one weight vector are required")
    config = config or TangencyConfig()

    pairs = [(si, wi) for si in range(len(seeds)) for wi in range(len(weights))]

    def run(pair: Tuple[int, int]) -> Optional[TangencySample]:
        si, wi = pair
        start = np.asarray(seeds[si], dtype=float) * R
        return _solve_on_sphere(f, start, R, np.asarray(weights[wi], dtype=float), config, wi, si)

    samples = [s for s in parallel_map(run, pairs, executor) if s is not None]
    logger.debug(f"Sphere R={R:g}: {len(samples)} of {len(pairs)} runs converged onto the tangency variety")
    return samples


def decays(series: Sequence[float], floor: float = 0.0) -> bool:
    """Last entry at most DECAY_RATIO times the first, or already below floor."""
    return series[-1] <= DECAY_RATIO * series[0] or series[-1] <= floor


def classify_trace(trace: TangencyTrace, config: TangencyConfig, tbar: Optional[np.ndarray]) -> List[str]:
    """Witness labels for a trace with a limit estimate, relative to tbar."""
    if trace.limit_estimate is None or len(trace.samples) < 2:
        return []
    slack = sublevel_slack(tbar, config.slack_rtol)
    if any(sublevel_violation(s.fvalue, tbar) > slack for s in trace.samples):
        return []
    labels = []
    if decays([s.nu for s in trace.samples], config.dependency_tol):
        labels.append(PS_WITNESS)
    if decays([s.nu_scaled for s in trace.samples], config.dependency_tol):
        labels.append(WEAK_PS_WITNESS)
    if all(s.dependency <= config.dependency_tol for s in trace.samples):
        labels.append(TANGENCY_WITNESS)
    return labels


def limit_of(samples: Sequence[TangencySample], cluster_rtol: float) -> Optional[np.ndarray]:
    """Last f-value when the last three agree within cluster_rtol * (1 + ||t||)."""
    if len(samples) < 3:
        return None
    last = samples[-1].fvalue
    if not np.all(np.isfinite(last)):
        return None
    tolerance = cluster_rtol * (1.0 + float(np.linalg.norm(last)))
    if all(np.linalg.norm(s.fvalue - last) <= tolerance for s in samples[-3:]):
        return last.copy()
    return None


def trace_to_infinity(
    f: PolyMap,
    seed_sample: TangencySample,
    radii: Sequence[float],
    weight: Optional[np.ndarray] = None,
    config: Optional[TangencyConfig] = None,
    tbar: Optional[np.ndarray] = None,
) -> TangencyTrace:
    """
    Follow a tangency point along an increasing radius schedule.

    Args:
        f: Polynomial map
        seed_sample: Starting sample, lying on the first sphere of the schedule
        radii: Strictly increasing radii starting at seed_sample.radius
        weight: Scalarisation weight (defaults to the first coordinate vector)
        config: Solver tolerances
        tbar: Optional sublevel used for classification

    Returns:
        The trace with limit estimate and classification

    Raises:
        LostTrack: If continuation fails at some radius
    """
    config = config or TangencyConfig()
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("Radii must be strictly increasing")
    if abs(radii[0] - seed_sample.radius) > 1e-9 * radii[0]:
        raise ValueError(f"Schedule starts at {radii[0]:g} but the seed lies at radius {seed_sample.radius:g}")
    if weight is None:
        weight = np.zeros(f.ncomponents)
        weight[0] = 1.0

    trace = TangencyTrace(samples=[seed_sample], weight=np.asarray(weight, dtype=float))
    previous = seed_sample
    for radius in radii[1:]:
        start = previous.x * (radius / previous.radius)
        sample = _solve_on_sphere(
            f, start, radius, trace.weight, config, seed_sample.weight_index, seed_sample.seed_index
        )
        if sample is None:
            raise LostTrack(f"continuation lost at radius {radius:g}", trace)
        trace.samples.append(sample)
        previous = sample

    trace.limit_estimate = limit_of(trace.samples, config.cluster_rtol)
    trace.classification = classify_trace(trace, config, tbar)
    return trace


def trace_to_rows(trace: TangencyTrace) -> Tuple[List[str], List[List[float]]]:
    """CSV header and rows: radius, x_1..x_n, f_1..f_m, dependency, nu, nu_scaled."""
    if not trace.samples:
        return [], []
    n = trace.samples[0].x.shape[0]
    m = trace.samples[0].fvalue.shape[0]
    header = (
        ["radius"]
        + [f"x_{j + 1}" for j in range(n)]
        + [f"f_{i + 1}" for i in range(m)]
        + ["dependency", "nu", "nu_scaled"]
    )
    rows = [
        [s.radius, *s.x.tolist(), *s.fvalue.tolist(), s.dependency, s.nu, s.nu_scaled]
        for s in trace.samples
    ]
    return header, rows


def _distinct(samples: List[TangencySample]) -> List[TangencySample]:
    """Drop samples that repeat an earlier (weight, point) pair."""
    kept: List[TangencySample] = []
    for sample in samples:
        duplicate = any(
            k.weight_index == sample.weight_index
            and np.linalg.norm(k.x - sample.x) <= 1e-6 * sample.radius
            for k in kept
        )
        if not duplicate:
            kept.append(sample)
    return kept


def estimate_tangency_values(
    f: PolyMap,
    config: Optional[TangencyConfig] = None,
    executor: Optional[Executor] = None,
) -> TangencyEstimate:
    """
    Estimate the tangency values at infinity, optionally below a sublevel.

    Stationary points on the first sphere over the seed/weight grid are traced
    along the radius schedule; traces with a limit (and, when a sublevel is
    set, with every value below it up to slack) are clustered.

    Returns:
        TangencyEstimate; no clusters means no tangency value was detected at
        this budget
    """
    config = config or TangencyConfig()
    radii = config.radii()
    tbar = None if config.sublevel is None else np.asarray(config.sublevel, dtype=float)

    rng = np.random.default_rng(config.seed)
    seeds = sphere_directions(f.nvars, config.n_seeds, rng)
    weights = simplex_weights(f.ncomponents, config.n_weights, config.seed)

    starts = _distinct(sphere_stationary_points(f, float(radii[0]), seeds, weights, config, executor))
    starts.sort(key=lambda s: (s.seed_index, s.weight_index))

    def follow(sample: TangencySample) -> Optional[TangencyTrace]:
        try:
            return trace_to_infinity(f, sample, radii, weights[sample.weight_index], config, tbar)
        except LostTrack as e:
            logger.debug(f"Trace from seed {sample.seed_index}, weight {sample.weight_index}: {e}")
            return None

    followed = parallel_map(follow, starts, executor)
    traces = [t for t in followed if t is not None]
    n_lost = len(followed) - len(traces)

    slack = sublevel_slack(tbar, config.slack_rtol)
    kept = [
        (index, t) for index, t in enumerate(traces)
        if t.limit_estimate is not None
        and all(sublevel_violation(s.fvalue, tbar) <= slack for s in t.samples)
    ]

    raw_clusters = cluster_points([t.limit_estimate for _, t in kept], relative_tolerance(config.cluster_rtol))
    clusters = []
    for raw in raw_clusters:
        members = [kept[i] for i in raw.members]
        labels = sorted({label for _, t in members for label in t.classification})
        clusters.append(ValueCluster(
            center=raw.center,
            count=raw.count,
            trace_indices=sorted(index for index, _ in members),
            min_nu=min(t.samples[-1].nu for _, t in members),
            min_nu_scaled=min(t.samples[-1].nu_scaled for _, t in members),
            classification=labels,
        ))

    logger.info(
        f"Tangency estimate: {len(clusters)} clusters from {len(kept)} convergent traces "
        f"({len(starts)} started, {n_lost} lost)"
    )
    return TangencyEstimate(clusters=clusters, traces=traces, n_started=len(starts), n_lost=n_lost, sublevel=tbar)
