"""
Exact integer and rational linear algebra for polypareto.
"""

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import List, Sequence, Tuple

Vector = Tuple[int, ...]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b, 1)


def row_echelon(rows: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """
    Reduced row echelon form over the rationals.

    Returns:
        (nonzero reduced rows, pivot column indices)
    """
    matrix = [[Fraction(v) for v in row] for row in rows]
    if not matrix:
        return [], []
    ncols = len(matrix[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][c] != 0), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        lead = matrix[r][c]
        matrix[r] = [v / lead for v in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][c] != 0:
                factor = matrix[i][c]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(c)
        r += 1
        if r == len(matrix):
            break
    return matrix[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_echelon(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List[Fraction]]:
    """Basis of {w : rows . w = 0} in Q^ncols."""
    reduced, pivots = row_echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        w = [Fraction(0)] * ncols
        w[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            w[p] = -row[f]
        basis.append(w)
    return basis


def primitive(vector: Sequence) -> Vector:
    """Integer multiple of a rational vector with coprime entries (zero stays zero)."""
    fractions = [Fraction(v) for v in vector]
    denominator = reduce(_lcm, (q.denominator for q in fractions), 1)
    integers = [int(q * denominator) for q in fractions]
    divisor = reduce(gcd, (abs(v) for v in integers), 0)
    if divisor == 0:
        return tuple(integers)
    return tuple(v // divisor for v in integers)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def spanning_coordinates(points: Sequence[Sequence[int]]) -> List[int]:
    """Coordinates on which the projection of span(points) is injective."""
    return row_echelon(points)[1]


def as_pair(q: Fraction) -> List[int]:
    """Serialise a rational as [numerator, denominator]."""
    q = Fraction(q)
    return [q.numerator, q.denominator]
