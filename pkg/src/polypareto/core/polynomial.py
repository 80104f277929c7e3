"""
Sparse multivariate polynomials and polynomial maps for polypareto.

Terms are stored in a dict keyed by exponent tuple and kept in graded
lexicographic order (highest first), so printing and equality are
deterministic. Evaluation is a term sum over cached variable powers; the
Jacobian comes from exact term-wise differentiation.
"""

import logging
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]


class ParseError(Exception):
    """Raised when polynomial text does not follow the grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


def _grlex_key(exponents: Exponents) -> Tuple[int, Exponents]:
    return (sum(exponents), exponents)


@dataclass(frozen=True)
class Monomial:
    """A single term a_k * x^k."""
    exponents: Exponents
    coefficient: float

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.exponents):
            raise ValueError(f"Negative exponent in {self.exponents}")
        if not math.isfinite(self.coefficient) or self.coefficient == 0.0:
            raise ValueError(f"Monomial coefficient must be finite and nonzero, got {self.coefficient}")

    @property
    def degree(self) -> int:
        return sum(self.exponents)


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponents, float]] = None):
        if nvars < 1:
            raise ValueError(f"nvars must be positive, got {nvars}")
        self.nvars = nvars

        merged: Dict[Exponents, float] = {}
        for exponents, coefficient in (terms or {}).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != nvars:
                raise ValueError(f"Exponent vector {exponents} does not have length {nvars}")
            merged[exponents] = merged.get(exponents, 0.0) + float(coefficient)

        self._terms: Dict[Exponents, float] = {
            e: merged[e]
            for e in sorted(merged, key=_grlex_key, reverse=True)
            if merged[e] != 0.0
        }

    @classmethod
    def constant(cls, nvars: int, value: float) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        """The coordinate polynomial x_index (0-based index)."""
        exponents = [0] * nvars
        exponents[index] = 1
        return cls(nvars, {tuple(exponents): 1.0})

    @property
    def terms(self) -> Tuple[Monomial, ...]:
        return tuple(Monomial(e, c) for e, c in self._terms.items())

    def term_dict(self) -> Dict[Exponents, float]:
        return dict(self._terms)

    @property
    def exponents(self) -> List[Exponents]:
        return list(self._terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array(list(self._terms.values()), dtype=float)

    def coefficient(self, exponents: Exponents) -> float:
        return self._terms.get(tuple(exponents), 0.0)

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"Polynomial(nvars={self.nvars}, '{self.to_text()}')"

    def _check_compatible(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"Variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial(self.nvars, terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, scalar: float) -> "Polynomial":
        return Polynomial(self.nvars, {e: c * scalar for e, c in self._terms.items()})

    __rmul__ = __mul__

    def derivative(self, j: int) -> "Polynomial":
        """Exact partial derivative with respect to x_{j+1}."""
        if not 0 <= j < self.nvars:
            raise IndexError(f"Variable index {j} out of range for {self.nvars} variables")
        terms: Dict[Exponents, float] = {}
        for e, c in self._terms.items():
            if e[j] == 0:
                continue
            lowered = e[:j] + (e[j] - 1,) + e[j + 1:]
            terms[lowered] = terms.get(lowered, 0.0) + c * e[j]
        return Polynomial(self.nvars, terms)

    def evaluate(self, x: Sequence[float]) -> float:
        return float(PolyMap(self.nvars, [self]).evaluate(x)[0])

    def to_text(self) -> str:
        """Canonical printout that reparses to the same term set."""
        if not self._terms:
            return "0"
        pieces: List[str] = []
        for idx, (e, c) in enumerate(self._terms.items()):
            sign = "-" if c < 0 else "+"
            body = _format_term(e, abs(c))
            if idx == 0:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)


def _format_coefficient(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _format_term(exponents: Exponents, magnitude: float) -> str:
    factors = [
        f"x{j + 1}" if e == 1 else f"x{j + 1}^{e}"
        for j, e in enumerate(exponents)
        if e > 0
    ]
    if not factors:
        return _format_coefficient(magnitude)
    if magnitude == 1.0:
        return "*".join(factors)
    return "*".join([_format_coefficient(magnitude)] + factors)


class _CompiledMap:
    """Exponent table plus value/derivative coefficient matrices for fast evaluation."""

    def __init__(self, components: Sequence[Polynomial], nvars: int):
        index: Dict[Exponents, int] = {}

        def slot(e: Exponents) -> int:
            if e not in index:
                index[e] = len(index)
            return index[e]

        value_entries = []
        deriv_entries = []
        for i, p in enumerate(components):
            for e, c in p.term_dict().items():
                value_entries.append((i, slot(e), c))
            for j in range(nvars):
                for e, c in p.derivative(j).term_dict().items():
                    deriv_entries.append((i * nvars + j, slot(e), c))

        size = max(len(index), 1)
        self.exponents = np.zeros((size, nvars), dtype=np.int64)
        for e, k in index.items():
            self.exponents[k] = e
        self.values = np.zeros((len(components), size))
        for i, k, c in value_entries:
            self.values[i, k] += c
        self.derivatives = np.zeros((len(components) * nvars, size))
        for row, k, c in deriv_entries:
            self.derivatives[row, k] += c
        self.max_power = int(self.exponents.max()) if self.exponents.size else 0
        self.nvars = nvars

    def monomials(self, X: np.ndarray) -> np.ndarray:
        """Monomial values for a batch of points, shape (N, K)."""
        N = X.shape[0]
        powers = np.ones((N, self.nvars, self.max_power + 1))
        for k in range(1, self.max_power + 1):
            powers[:, :, k] = powers[:, :, k - 1] * X
        cols = np.arange(self.nvars)[None, :]
        return np.prod(powers[:, cols, self.exponents], axis=2)


class PolyMap:
    """Immutable polynomial map f: R^n -> R^m."""

    def __init__(self, nvars: int, components: Sequence[Polynomial]):
        if nvars < 1:
            raise ValueError(f"nvars must be positive, got {nvars}")
        if not components:
            raise ValueError("A polynomial map needs at least one component")
        for p in components:
            if p.nvars != nvars:
                raise ValueError(f"Component has {p.nvars} variables, map has {nvars}")
        self.nvars = nvars
        self.components: Tuple[Polynomial, ...] = tuple(components)

    @property
    def ncomponents(self) -> int:
        return len(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.nvars == other.nvars and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.nvars, self.components))

    def __repr__(self) -> str:
        return f"PolyMap(nvars={self.nvars}, m={self.ncomponents})"

    @cached_property
    def _compiled(self) -> _CompiledMap:
        return _CompiledMap(self.components, self.nvars)

    def _as_point(self, x: Sequence[float]) -> np.ndarray:
        point = np.asarray(x, dtype=float).reshape(-1)
        if point.shape[0] != self.nvars:
            raise ValueError(f"Point has {point.shape[0]} coordinates, map expects {self.nvars}")
        return point

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        return self.evaluate_many(self._as_point(x)[None, :])[0]

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Evaluate at each row of X (shape N x n), returning N x m."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.nvars:
            raise ValueError(f"Expected points of shape (N, {self.nvars}), got {X.shape}")
        with np.errstate(over='ignore', invalid='ignore'):
            return self._compiled.monomials(X) @ self._compiled.values.T

    def jacobian(self, x: Sequence[float]) -> np.ndarray:
        point = self._as_point(x)
        with np.errstate(over='ignore', invalid='ignore'):
            flat = self._compiled.derivatives @ self._compiled.monomials(point[None, :])[0]
        return flat.reshape(self.ncomponents, self.nvars)

    def hessian(self, i: int, x: Sequence[float]) -> np.ndarray:
        """Symbolic Hessian of component i evaluated at x."""
        point = self._as_point(x)
        p = self.components[i]
        H = np.empty((self.nvars, self.nvars))
        for j in range(self.nvars):
            row = PolyMap(self.nvars, [p.derivative(j)])
            H[j] = row.jacobian(point)[0]
        return H

    def scaled(self, factor: float) -> "PolyMap":
        return PolyMap(self.nvars, [p * factor for p in self.components])

    def permuted(self, order: Sequence[int]) -> "PolyMap":
        return PolyMap(self.nvars, [self.components[i] for i in order])

    def padded(self, nvars: int) -> "PolyMap":
        """Same map viewed in more variables (new variables do not appear)."""
        if nvars < self.nvars:
            raise ValueError(f"Cannot pad {self.nvars} variables down to {nvars}")
        extra = (0,) * (nvars - self.nvars)
        return PolyMap(nvars, [
            Polynomial(nvars, {e + extra: c for e, c in p.term_dict().items()})
            for p in self.components
        ])

    def max_degree(self) -> int:
        return max(p.degree for p in self.components)

    def coefficient_norm(self) -> float:
        """Euclidean norm of all coefficients of all components."""
        coefficients = np.concatenate([p.coefficients for p in self.components])
        return float(np.linalg.norm(coefficients)) if coefficients.size else 0.0

    def to_text(self) -> str:
        return "\n".join(p.to_text() for p in self.components)


def evaluate(f: PolyMap, x: Sequence[float]) -> np.ndarray:
    """Value f(x) in R^m. Overflow is returned as inf for callers to flag."""
    return f.evaluate(x)


def evaluate_many(f: PolyMap, X: np.ndarray) -> np.ndarray:
    return f.evaluate_many(X)


def jacobian(f: PolyMap, x: Sequence[float]) -> np.ndarray:
    """m x n matrix whose row i is the gradient of f_i at x."""
    return f.jacobian(x)


def hessian(f: PolyMap, i: int, x: Sequence[float]) -> np.ndarray:
    return f.hessian(i, x)


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<space>[ \t\r]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>x(?P<index>\d+))
  | (?P<op>[+\-*^])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str, line: int) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = next(name for name in ("space", "number", "var", "op") if match.group(name))
        if kind != "space":
            tokens.append(_Token(kind, match.group(0), pos + 1))
        pos = match.end()
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


class _Parser:
    """Recursive-descent parser for one polynomial expression."""

    def __init__(self, text: str, nvars: int, line: int):
        self.nvars = nvars
        self.line = line
        self.tokens = _tokenize(text, line)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message: str, token: Optional[_Token] = None) -> ParseError:
        token = token or self.peek()
        return ParseError(message, self.line, token.column)

    def parse(self) -> Polynomial:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        terms: Dict[Exponents, float] = {}
        sign = 1.0
        if self.peek().kind == "op" and self.peek().text in "+-":
            sign = -1.0 if self.advance().text == "-" else 1.0
        while True:
            exponents, coefficient = self.parse_term()
            terms[exponents] = terms.get(exponents, 0.0) + sign * coefficient
            token = self.peek()
            if token.kind == "end":
                break
            if token.kind == "op" and token.text in "+-":
                self.advance()
                sign = -1.0 if token.text == "-" else 1.0
                continue
            raise self.error(f"expected '+', '-' or end of line, found {token.text!r}")
        return Polynomial(self.nvars, terms)

    def parse_term(self) -> Tuple[Exponents, float]:
        exponents = [0] * self.nvars
        coefficient = 1.0
        while True:
            token = self.advance()
            if token.kind == "number":
                coefficient *= float(token.text)
            elif token.kind == "var":
                index = int(token.text[1:])
                if not 1 <= index <= self.nvars:
                    raise IndexError(
                        f"line {self.line}, column {token.column}: variable {token.text} "
                        f"outside x1..x{self.nvars}"
                    )
                power = 1
                if self.peek().kind == "op" and self.peek().text == "^":
                    self.advance()
                    power_token = self.advance()
                    if power_token.kind != "number" or not power_token.text.isdigit():
                        raise self.error("exponent must be an unsigned integer", power_token)
                    power = int(power_token.text)
                exponents[index - 1] += power
            else:
                raise self.error(f"expected a number or variable, found {token.text or 'end of line'!r}", token)
            if self.peek().kind == "op" and self.peek().text == "*":
                self.advance()
                continue
            return tuple(exponents), coefficient


def parse_polynomial(text: str, nvars: int, line: int = 1) -> Polynomial:
    """Parse one polynomial expression; ``line`` is used in error positions."""
    return _Parser(text, nvars, line).parse()


def parse_poly_map(text: str, nvars: int, first_line: int = 1) -> PolyMap:
    """
    Parse a polynomial map, one component per non-blank line.

    Args:
        text: Component expressions separated by newlines
        nvars: Number of variables n
        first_line: Line number of the first line of ``text`` for diagnostics

    Returns:
        The parsed map with canonical (merged, zero-pruned) term sets

    Raises:
        ParseError: On malformed input, with line and column
        IndexError: On a variable index outside 1..nvars
    """
    if nvars < 1:
        raise ValueError(f"nvars must be positive, got {nvars}")
    components = [
        parse_polynomial(raw, nvars, first_line + offset)
        for offset, raw in enumerate(text.splitlines())
        if raw.strip()
    ]
    if not components:
        raise ParseError("no components found", first_line, 1)
    logger.debug(f"Parsed polynomial map with {len(components)} components in {nvars} variables")
    return PolyMap(nvars, components)
