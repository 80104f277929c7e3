"""
Newton polyhedra at infinity and Khovanskii non-degeneracy for polypareto.

Polytope work is exact: exponents are integers, facet normals are rebuilt
from rational null spaces and every face is an argmax set of an integer
linear form. Floating point only enters the hull candidate search and the
root sampling of principal parts.
"""

import itertools
import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares
from scipy.spatial import ConvexHull

from ..utils.lattice import Vector, as_pair, dot, nullspace, primitive, rank, spanning_coordinates
from ..utils.linalg import smallest_singular_value
from ..utils.sampling import child_rngs
from .polynomial import PolyMap, Polynomial
from .tangency import parallel_map

logger = logging.getLogger(__name__)

MAX_FACE_DIMENSION = 4

NONDEGENERATE = "nondegenerate_probabilistic"
DEGENERATE = "degenerate_witness"
NO_ZERO_FOUND = "no_zero_found"

# Weakest first; the overall status is the weakest face status unless a face is degenerate.
_STATUS_ORDER = [DEGENERATE, NO_ZERO_FOUND, NONDEGENERATE]


class DimensionUnsupported(Exception):
    """Raised when face enumeration is asked for more than four variables."""
    pass


class FaceMismatch(Exception):
    """Raised when a face does not support the Newton polytope of a polynomial."""
    pass


@dataclass(frozen=True)
class SupportingFace:
    """Face of a lattice polytope cut out by an integer outer normal."""
    normal: Vector
    value: int
    vertices: Tuple[Vector, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "normal": [as_pair(Fraction(w)) for w in self.normal],
            "value": self.value,
            "vertices": [list(v) for v in self.vertices],
        }


@dataclass(frozen=True)
class LatticePolytope:
    """Convex hull of integer points, kept as its extreme points."""
    dim: int
    vertices: Tuple[Vector, ...]

    def support(self, w: Sequence) -> Fraction:
        return max(Fraction(dot(w, v)) for v in self.vertices)

    def face(self, w: Sequence) -> Tuple[Vector, ...]:
        h = self.support(w)
        return tuple(v for v in self.vertices if dot(w, v) == h)

    def supporting_face(self, w: Sequence[int]) -> SupportingFace:
        normal = tuple(int(c) for c in w)
        value = self.support(normal)
        return SupportingFace(normal=normal, value=int(value), vertices=self.face(normal))

    @property
    def dimension(self) -> int:
        """Affine dimension, computed exactly."""
        base = self.vertices[0]
        return rank([[a - b for a, b in zip(v, base)] for v in self.vertices[1:]]) if len(self.vertices) > 1 else 0

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "vertices": [list(v) for v in self.vertices]}


@dataclass
class FaceAtInfinity:
    normal: Vector
    value: int
    vertex_subset: Tuple[Vector, ...]
    decomposition: List[Tuple[Vector, ...]]
    dimension: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "normal": [as_pair(Fraction(w)) for w in self.normal],
            "value": self.value,
            "dimension": self.dimension,
            "vertex_subset": [list(v) for v in self.vertex_subset],
            "decomposition": [[list(v) for v in part] for part in self.decomposition],
        }


@dataclass
class KhovanskiiBudget:
    n_starts: int = 20
    box: float = 3.0
    min_abs_coordinate: float = 0.05
    root_rtol: float = 1e-9
    rank_rtol: float = 1e-6
    seed: int = 0


@dataclass
class KhovanskiiReport:
    face: FaceAtInfinity
    status: str
    witness: Optional[np.ndarray] = None
    residual: Optional[float] = None
    sigma_min: Optional[float] = None
    n_zeros: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "face": self.face.to_dict(),
            "status": self.status,
            "witness": None if self.witness is None else self.witness.tolist(),
            "residual": self.residual,
            "sigma_min": self.sigma_min,
            "n_zeros": self.n_zeros,
        }


@dataclass
class KhovanskiiResult:
    reports: List[KhovanskiiReport] = field(default_factory=list)
    status: str = NO_ZERO_FOUND
    budget: Optional[KhovanskiiBudget] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "faces": [r.to_dict() for r in self.reports],
            "n_starts": None if self.budget is None else self.budget.n_starts,
        }


@dataclass
class _Facet:
    normal: Vector
    value: int
    members: FrozenSet[int]


def _exact_facets(points: List[Vector]) -> List[_Facet]:
    """Facets of hull(points) with primitive integer outer normals in the ambient space."""
    n = len(points[0])
    base = points[0]
    coords = spanning_coordinates([[a - b for a, b in zip(p, base)] for p in points])
    d = len(coords)
    if d == 0:
        return []

    def lift(w: Sequence[int]) -> Vector:
        full = [0] * n
        for c, value in zip(coords, w):
            full[c] = int(value)
        return tuple(full)

    projected = [tuple(p[c] for c in coords) for p in points]
    if d == 1:
        facets = []
        for sign in (1, -1):
            values = [sign * p[0] for p in projected]
            h = max(values)
            facets.append(_Facet(lift((sign,)), h, frozenset(i for i, v in enumerate(values) if v == h)))
        return facets

    array = np.array(projected, dtype=float)
    hull = ConvexHull(array)
    scale = max(1.0, float(np.abs(array).max()))
    found: Dict[Vector, _Facet] = {}
    for equation in hull.equations:
        on = np.flatnonzero(np.abs(array @ equation[:-1] + equation[-1]) <= 1e-9 * scale)
        if len(on) < d:
            continue
        ref = projected[on[0]]
        basis = nullspace([[a - b for a, b in zip(projected[i], ref)] for i in on[1:]], d)
        if len(basis) != 1:
            continue
        w = primitive(basis[0])
        if float(np.dot(w, equation[:-1])) < 0:
            w = tuple(-c for c in w)
        values = [dot(w, p) for p in projected]
        h = max(values)
        members = [i for i, v in enumerate(values) if v == h]
        anchor = projected[members[0]]
        if rank([[a - b for a, b in zip(projected[i], anchor)] for i in members[1:]]) != d - 1:
            continue
        found.setdefault(w, _Facet(lift(w), h, frozenset(members)))
    return [found[key] for key in sorted(found)]


def _faces(facets: List[_Facet]) -> List[FrozenSet[int]]:
    """All nonempty intersections of facet point sets."""
    faces = {facet.members for facet in facets}
    frontier = list(faces)
    while frontier:
        fresh = []
        for face in frontier:
            for facet in facets:
                meet = face & facet.members
                if meet and meet not in faces:
                    faces.add(meet)
                    fresh.append(meet)
        frontier = fresh
    return sorted(faces, key=lambda s: (-len(s), sorted(s)))


def _unique_points(points: Sequence[Sequence[int]]) -> List[Vector]:
    return sorted({tuple(int(c) for c in p) for p in points})


def extreme_points(points: Sequence[Sequence[int]]) -> Tuple[Vector, ...]:
    """Extreme points of the hull of integer points, decided exactly."""
    unique = _unique_points(points)
    if len(unique) == 1:
        return (unique[0],)
    facets = _exact_facets(unique)
    vertices = [next(iter(face)) for face in _faces(facets) if len(face) == 1]
    return tuple(sorted(unique[i] for i in vertices))


def newton_polytope(p: Polynomial) -> LatticePolytope:
    """Newton polytope at infinity: hull of the exponents of p and the origin."""
    generators = list(p.exponents) + [(0,) * p.nvars]
    return LatticePolytope(dim=p.nvars, vertices=extreme_points(generators))


def is_convenient(f: PolyMap) -> Tuple[List[bool], bool]:
    """
    Convenience per component and overall.

    A component is convenient when, for every variable, it has a pure power
    term of that variable.
    """
    flags = []
    for p in f.components:
        axes = set()
        for e in p.exponents:
            support = [j for j, k in enumerate(e) if k > 0]
            if len(support) == 1:
                axes.add(support[0])
        flags.append(len(axes) == f.nvars)
    return flags, all(flags)


def minkowski_sum(polytopes: Sequence[LatticePolytope]) -> LatticePolytope:
    """Minkowski sum, from the sums of vertex tuples."""
    sums = [
        tuple(sum(coords) for coords in zip(*choice))
        for choice in itertools.product(*(P.vertices for P in polytopes))
    ]
    return LatticePolytope(dim=polytopes[0].dim, vertices=extreme_points(sums))


def faces_at_infinity(f: PolyMap) -> List[FaceAtInfinity]:
    """
    Faces of the Newton polytope at infinity of f that avoid the origin.

    Each face carries a primitive outer normal from the relative interior of
    its normal cone and the decomposition into faces of the component
    polytopes in that direction. When several facets meet at a face, the
    normal is the primitive sum of their primitive normals rather than the
    lexicographically smallest normal, which an open cone need not have.
    Any interior normal gives the same face and decomposition.

    Raises:
        DimensionUnsupported: If f has more than four variables
    """
    if f.nvars > MAX_FACE_DIMENSION:
        raise DimensionUnsupported(f"Face enumeration supports n <= {MAX_FACE_DIMENSION}, got n = {f.nvars}")

    components = [newton_polytope(p) for p in f.components]
    total = minkowski_sum(components)
    points = list(total.vertices)
    if len(points) == 1:
        return []

    facets = _exact_facets(points)
    faces: List[FaceAtInfinity] = []
    for member_set in _faces(facets):
        containing = [facet.normal for facet in facets if member_set <= facet.members]
        normal = primitive([sum(column) for column in zip(*containing)])
        if not any(normal):
            continue
        value = max(dot(normal, v) for v in points)
        vertex_subset = tuple(sorted(v for v in points if dot(normal, v) == value))
        if value <= 0:
            continue
        if set(vertex_subset) != {points[i] for i in member_set}:
            logger.warning(f"Normal {normal} does not cut out its face exactly; face skipped")
            continue
        faces.append(FaceAtInfinity(
            normal=normal,
            value=int(value),
            vertex_subset=vertex_subset,
            decomposition=[P.face(normal) for P in components],
            dimension=rank([[a - b for a, b in zip(v, vertex_subset[0])] for v in vertex_subset[1:]])
            if len(vertex_subset) > 1 else 0,
        ))

    logger.info(f"Newton polytope at infinity: {len(total.vertices)} vertices, {len(faces)} faces avoiding the origin")
    return faces


def principal_part(p: Polynomial, face: SupportingFace) -> Polynomial:
    """
    Terms of p whose exponents lie on the given face of its Newton polytope.

    Raises:
        FaceMismatch: If the face's value or vertices do not match the
            support of the Newton polytope of p in the face's normal direction
    """
    polytope = newton_polytope(p)
    h = polytope.support(face.normal)
    if h != face.value:
        raise FaceMismatch(f"Support value {h} of the Newton polytope differs from the face value {face.value}")
    if set(face.vertices) != set(polytope.face(face.normal)):
        raise FaceMismatch(f"Face vertices {list(face.vertices)} are not the face of the Newton polytope at {face.normal}")
    return Polynomial(p.nvars, {e: c for e, c in p.term_dict().items() if dot(face.normal, e) == h})


def principal_map(f: PolyMap, face: FaceAtInfinity) -> PolyMap:
    """f_Delta: the principal part of each component on its share of the face."""
    parts = []
    for p in f.components:
        parts.append(principal_part(p, newton_polytope(p).supporting_face(face.normal)))
    return PolyMap(f.nvars, parts)


def _torus_starts(n: int, count: int, budget: KhovanskiiBudget, rng: np.random.Generator) -> np.ndarray:
    starts = rng.uniform(-budget.box, budget.box, size=(count, n))
    small = np.abs(starts) < budget.min_abs_coordinate
    while small.any():
        starts[small] = rng.uniform(-budget.box, budget.box, size=int(small.sum()))
        small = np.abs(starts) < budget.min_abs_coordinate
    return starts


def scaled_jacobian(g: PolyMap, x: np.ndarray) -> np.ndarray:
    """The m x n matrix [x_j * d g_i / d x_j]."""
    return g.jacobian(x) * x[None, :]


def _check_face(
    f: PolyMap,
    face: FaceAtInfinity,
    budget: KhovanskiiBudget,
    rng: np.random.Generator,
) -> KhovanskiiReport:
    g = principal_map(f, face)
    root_tol = budget.root_rtol * (1.0 + g.coefficient_norm())
    report = KhovanskiiReport(face=face, status=NO_ZERO_FOUND)

    for start in _torus_starts(f.nvars, budget.n_starts, budget, rng):
        result = least_squares(
            g.evaluate, start, jac=g.jacobian, method="trf", xtol=1e-15, ftol=1e-15, gtol=None
        )
        x = np.asarray(result.x, dtype=float)
        residual = float(np.linalg.norm(g.evaluate(x)))
        if residual > root_tol or np.any(np.abs(x) < budget.min_abs_coordinate):
            continue

        report.n_zeros += 1
        S = scaled_jacobian(g, x)
        sigma = 0.0 if g.ncomponents > g.nvars else smallest_singular_value(S)
        if sigma <= budget.rank_rtol * (float(np.linalg.norm(S)) + 1.0):
            report.status = DEGENERATE
            report.witness, report.residual, report.sigma_min = x, residual, sigma
            return report
        report.status = NONDEGENERATE
        if report.sigma_min is None or sigma < report.sigma_min:
            report.witness, report.residual, report.sigma_min = x, residual, sigma
    return report


def check_khovanskii(
    f: PolyMap,
    budget: Optional[KhovanskiiBudget] = None,
    executor: Optional[Executor] = None,
) -> KhovanskiiResult:
    """
    Sample zeros of every principal part on the torus and test the scaled Jacobian rank.

    Only degenerate witnesses are certificates; the other statuses are relative
    to the number of starts.

    Raises:
        DimensionUnsupported: If f has more than four variables
    """
    budget = budget or KhovanskiiBudget()
    faces = faces_at_infinity(f)
    if not faces:
        return KhovanskiiResult(reports=[], status=NO_ZERO_FOUND, budget=budget)

    rngs = child_rngs(budget.seed, len(faces))
    reports = parallel_map(lambda pair: _check_face(f, pair[0], budget, pair[1]), list(zip(faces, rngs)), executor)
    status = min((r.status for r in reports), key=_STATUS_ORDER.index)
    logger.info(f"Khovanskii check over {len(faces)} faces: {status}")
    return KhovanskiiResult(reports=reports, status=status, budget=budget)
