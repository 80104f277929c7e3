"""
Problem file (.vp) loading for polypareto.

A problem file starts with ``vars: <n>`` and lists one component polynomial
per line. Optional ``tbar:`` and ``budget:`` lines may appear anywhere;
``#`` starts a comment and blank lines are ignored::

    # Motzkin polynomial
    vars: 2
    x1^2*x2^4 + x1^4*x2^2 - 3*x1^2*x2^2 + 1
    tbar: 0.5
    budget: tangency.n_seeds=16, pareto.box_radius=2
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

import numpy as np

from ..config.manager import ConfigurationManager
from ..config.schemas import ConfigValidationError
from ..core.polynomial import ParseError, PolyMap, parse_polynomial

logger = logging.getLogger(__name__)


class ProblemFileError(Exception):
    """Raised when a problem file is missing or structurally malformed."""
    pass


@dataclass
class ProblemFile:
    name: str
    f: PolyMap
    tbar: Optional[np.ndarray] = None
    budget_overrides: List[Tuple[str, Any]] = field(default_factory=list)
    path: Optional[Path] = None


def parse_vector(text: str) -> np.ndarray:
    """
    Parse comma-separated reals; ``inf`` and ``-inf`` are accepted.

    Raises:
        ValueError: On an empty list or a non-numeric entry
    """
    parts = [p.strip() for p in text.split(',')]
    if not parts or any(not p for p in parts):
        raise ValueError(f"Expected comma-separated numbers, got {text!r}")
    try:
        return np.array([float(p) for p in parts], dtype=float)
    except ValueError:
        raise ValueError(f"Expected comma-separated numbers, got {text!r}")


def _strip_comment(line: str) -> str:
    return line.split('#', 1)[0].strip()


def parse_problem(text: str, name: str = "problem") -> ProblemFile:
    """
    Parse the contents of a problem file.

    Raises:
        ProblemFileError: On a missing or misplaced ``vars:`` line, bad
            ``tbar:``/``budget:`` lines or a tbar of the wrong length
        ParseError: On a malformed component polynomial
        IndexError: On a variable index above n
    """
    nvars: Optional[int] = None
    components = []
    tbar: Optional[np.ndarray] = None
    overrides: List[Tuple[str, Any]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        head, sep, rest = line.partition(':')
        keyword = head.strip().lower() if sep else ""

        if keyword == "vars":
            if nvars is not None:
                raise ProblemFileError(f"{name}:{lineno}: duplicate vars line")
            try:
                nvars = int(rest.strip())
            except ValueError:
                raise ProblemFileError(f"{name}:{lineno}: vars must be a positive integer")
            if nvars < 1:
                raise ProblemFileError(f"{name}:{lineno}: vars must be a positive integer")
        elif keyword == "tbar":
            try:
                tbar = parse_vector(rest)
            except ValueError as e:
                raise ProblemFileError(f"{name}:{lineno}: {e}")
        elif keyword == "budget":
            for item in rest.split(','):
                if not item.strip():
                    continue
                try:
                    key, value = ConfigurationManager.parse_override(item)
                except ConfigValidationError as e:
                    raise ProblemFileError(f"{name}:{lineno}: {e}")
                overrides.append((f"budgets.{key}", value))
        else:
            if nvars is None:
                raise ProblemFileError(f"{name}:{lineno}: component before the vars line")
            components.append(parse_polynomial(line, nvars, lineno))

    if nvars is None:
        raise ProblemFileError(f"{name}: missing vars line")
    if not components:
        raise ProblemFileError(f"{name}: no component polynomials")
    f = PolyMap(nvars, components)
    if tbar is not None and tbar.shape[0] != f.ncomponents:
        raise ProblemFileError(f"{name}: tbar has {tbar.shape[0]} entries, the map has {f.ncomponents} components")

    logger.debug(f"Parsed problem {name}: n={nvars}, m={f.ncomponents}, {len(overrides)} budget overrides")
    return ProblemFile(name=name, f=f, tbar=tbar, budget_overrides=overrides)


def load_problem(path: Union[str, Path]) -> ProblemFile:
    """
    Load a ``.vp`` problem file.

    Raises:
        ProblemFileError: If the file cannot be read or is malformed
        ParseError: On a malformed component polynomial
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ProblemFileError(f"Cannot read problem file {path}: {e}")
    problem = parse_problem(text, path.stem)
    problem.path = path
    logger.info(f"Loaded problem {problem.name} from {path}")
    return problem


__all__ = ["ParseError", "ProblemFile", "ProblemFileError", "load_problem", "parse_problem", "parse_vector"]
