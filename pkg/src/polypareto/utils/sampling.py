"""
Random streams, direction/weight sampling and value clustering for polypareto.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Sequence

import numpy as np
from scipy.stats import qmc

logger = logging.getLogger(__name__)


def child_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """Independent generators for ``count`` tasks, reproducible from ``seed``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def sphere_directions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` unit vectors uniform on the sphere in R^n."""
    directions = rng.standard_normal((count, n))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return directions / norms


def ball_points(n: int, count: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """``count`` points uniform in the ball of the given radius."""
    directions = sphere_directions(n, count, rng)
    radii = radius * rng.random(count) ** (1.0 / n)
    return directions * radii[:, None]


def box_points(n: int, count: int, half_width: float, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-half_width, half_width, size=(count, n))


def _to_simplex(u: np.ndarray) -> np.ndarray:
    """Map rows of [0,1)^(m-1) onto the probability simplex (sorted spacings)."""
    count = u.shape[0]
    cuts = np.sort(u, axis=1)
    padded = np.hstack([np.zeros((count, 1)), cuts, np.ones((count, 1))])
    return np.diff(padded, axis=1)


def simplex_weights(
    m: int,
    count: int,
    seed: int,
    include_vertices: bool = True,
    min_weight: float = 0.0,
) -> np.ndarray:
    """
    Low-discrepancy weight vectors on the probability simplex.

    Args:
        m: Number of components
        count: Number of interior (Halton) weights
        seed: Scrambling seed for the Halton sequence
        include_vertices: Append the m coordinate vectors
        min_weight: Lower bound on every entry (renormalised afterwards)

    Returns:
        Array of shape (k, m) with rows summing to 1
    """
    if m == 1:
        return np.ones((1, 1))

    rows = []
    if count > 0:
        halton = qmc.Halton(d=m - 1, scramble=True, seed=seed)
        rows.append(_to_simplex(halton.random(count)))
    if include_vertices:
        rows.append(np.eye(m))
    weights = np.vstack(rows) if rows else np.empty((0, m))

    if min_weight > 0.0:
        weights = np.maximum(weights, min_weight)
        weights = weights / weights.sum(axis=1, keepdims=True)
    return weights


@dataclass
class Cluster:
    """A group of nearby values with its representative centre."""
    center: np.ndarray
    members: List[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.members)


def relative_tolerance(rtol: float) -> Callable[[np.ndarray], float]:
    """Tolerance of the form rtol * (1 + ||t||)."""
    return lambda t: rtol * (1.0 + float(np.linalg.norm(t)))


def cluster_points(
    points: Sequence[np.ndarray],
    tolerance: Callable[[np.ndarray], float],
) -> List[Cluster]:
    """
    Greedy clustering by Euclidean distance.

    Points are visited in lexicographic order so the result does not depend
    on the order in which they were produced. A point joins the first cluster
    whose centre lies within ``tolerance(centre)``; centres are member means.
    """
    if not points:
        return []
    array = np.array([np.asarray(p, dtype=float) for p in points])
    order = np.lexsort(array.T[::-1])

    clusters: List[Cluster] = []
    for idx in order:
        point = array[idx]
        for cluster in clusters:
            if np.linalg.norm(point - cluster.center) <= tolerance(cluster.center):
                cluster.members.append(int(idx))
                cluster.center = array[cluster.members].mean(axis=0)
                break
        else:
            clusters.append(Cluster(center=point.copy(), members=[int(idx)]))

    logger.debug(f"Clustered {len(points)} points into {len(clusters)} clusters")
    return clusters
