"""
Command handlers for the polypareto command line.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from ..config.defaults import DEFAULT_CONFIG
from ..config.manager import ConfigurationManager
from ..config.schemas import ConfigValidationError
from ..core.analyzer import ProblemAnalyzer
from ..core.catalog import catalog_entries, run_catalog
from ..core.newton import DimensionUnsupported
from ..core.pareto import NO_CONCLUSION, PARETO_VERIFIED_LOCAL, UNVERIFIED
from ..core.polynomial import ParseError
from ..core.report_exporter import ReportExporter, ReportSchema, ReportValidationError
from ..core.sublevel import INCONCLUSIVE
from ..utils.problem_file import ProblemFile, ProblemFileError, load_problem, parse_vector
from .parser import build_parser, needs_map

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

GENERAL_CONFIG_NAME = DEFAULT_CONFIG['config_files']['general_config_name']


class UsageError(Exception):
    """A command-line argument the run cannot use."""


_USAGE_ERRORS = (UsageError, ParseError, ProblemFileError, ConfigValidationError, DimensionUnsupported)


@dataclass
class RunConfig:
    """Resolved settings of one command-line run."""
    seed: int
    budgets: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    output_path: Optional[Path] = None
    threads: Optional[int] = None

    @classmethod
    def from_manager(cls, manager: ConfigurationManager, args: argparse.Namespace) -> "RunConfig":
        return cls(
            seed=int(manager.get('run.seed', 0)),
            budgets=manager.get('budgets'),
            tolerances=manager.get('tolerances'),
            output_format=args.output_format or manager.get('output.format', 'json'),
            output_path=Path(args.out) if args.out else None,
            threads=manager.get('performance.max_workers'),
        )


def find_config_files(explicit: Optional[str] = None) -> Tuple[Optional[str], Optional[str]]:
    """General config (explicit path, else one found in the working directory) and the user config path."""
    general = explicit
    if general is None:
        candidate = Path.cwd() / GENERAL_CONFIG_NAME
        general = str(candidate) if candidate.exists() else None
    user = DEFAULT_CONFIG['config_files'].get('user_config_file')
    return general, user


def _budget_key(key: str) -> str:
    return key if key.split('.', 1)[0] in ('budgets', 'tolerances') else f"budgets.{key}"


def _vector(text: str, flag: str) -> np.ndarray:
    try:
        return parse_vector(text)
    except ValueError as e:
        raise UsageError(f"{flag}: {e}")


def _load(path: str) -> ProblemFile:
    try:
        return load_problem(path)
    except IndexError as e:
        raise UsageError(f"{path}: {e}")


def _radii_overrides(text: str) -> List[Tuple[str, Any]]:
    parts = [p.strip() for p in text.split(',')]
    if len(parts) != 3:
        raise UsageError(f"--radii expects R0,FACTOR,STEPS, got {text!r}")
    try:
        start, factor, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--radii expects R0,FACTOR,STEPS, got {text!r}")
    return [
        ("budgets.tangency.radius_start", start),
        ("budgets.tangency.radius_factor", factor),
        ("budgets.tangency.radius_steps", steps),
    ]


def build_configuration(args: argparse.Namespace, problem: Optional[ProblemFile]) -> ConfigurationManager:
    """
    Apply the configuration cascade for one run.

    Defaults, general config, user config, problem-file budget lines,
    --budget flags, then --radii, --threads and --seed.

    Raises:
        ConfigValidationError: If any layer produces an invalid configuration
    """
    manager = ConfigurationManager()
    general, user = find_config_files(args.config)
    manager.load_configuration(general_config_path=general, user_config_path=user)

    if problem is not None and problem.budget_overrides:
        manager.apply_overrides(problem.budget_overrides, source=f"problem file {problem.name}")

    flags = []
    for text in args.budget:
        key, value = ConfigurationManager.parse_override(text)
        flags.append((_budget_key(key), value))
    if args.radii:
        flags.extend(_radii_overrides(args.radii))
    if args.threads is not None:
        flags.append(("performance.max_workers", args.threads))
    if args.seed is not None:
        flags.append(("run.seed", args.seed))
    if flags:
        manager.apply_overrides(flags, source="command line")
    return manager


# ---------------------------------------------------------------------------
# Handlers: each returns (result, inconclusive)
# ---------------------------------------------------------------------------

Handler = Callable[[ProblemAnalyzer, Optional[ProblemFile], argparse.Namespace, RunConfig], Tuple[Dict[str, Any], bool]]


def _point(args: argparse.Namespace, problem: ProblemFile) -> np.ndarray:
    if not args.at:
        raise UsageError(f"{args.command} needs --at")
    x = _vector(args.at, "--at")
    if x.shape[0] != problem.f.nvars:
        raise UsageError(f"--at has {x.shape[0]} coordinates, the map has {problem.f.nvars} variables")
    if not np.all(np.isfinite(x)):
        raise UsageError("--at coordinates must be finite")
    return x


def _sublevel(args: argparse.Namespace, problem: ProblemFile, default: Optional[float] = None) -> Optional[np.ndarray]:
    """--tbar, else the problem file's tbar, else a constant vector (None when no default)."""
    if args.tbar:
        tbar = _vector(args.tbar, "--tbar")
    elif problem.tbar is not None:
        tbar = problem.tbar
    elif default is not None:
        tbar = np.full(problem.f.ncomponents, default)
    else:
        return None
    if tbar.shape[0] != problem.f.ncomponents:
        raise UsageError(f"tbar has {tbar.shape[0]} entries, the map has {problem.f.ncomponents} components")
    if np.any(np.isnan(tbar)) or np.any(tbar == -np.inf):
        raise UsageError("tbar entries must be finite or +inf")
    return tbar


def _eval(analyzer, problem, args, run):
    x = _point(args, problem)
    return {"x": x, "value": analyzer.evaluate(problem.f, x)}, False


def _rabier(analyzer, problem, args, run):
    x = _point(args, problem)
    result = analyzer.rabier(problem.f, x)
    return {"x": x, **result.to_dict()}, not result.converged


def _tangency(analyzer, problem, args, run):
    tbar = _sublevel(args, problem)
    estimate = analyzer.tangency(problem.f, tbar)
    result = estimate.to_dict(include_traces=run.output_format == "json")
    if run.output_format == "csv":
        if run.output_path is None:
            raise UsageError("--format csv needs --out DIRECTORY")
        written = ReportExporter().export_traces_csv(estimate.traces, run.output_path)
        result["trace_files"] = [str(p) for p in written]
    return result, False


def _sublevel_probes(analyzer, problem, args, run):
    tbar = _sublevel(args, problem)
    if tbar is None:
        raise UsageError("sublevel needs --tbar or a tbar line in the problem file")
    section = analyzer.section(problem.f, tbar)
    properness = analyzer.properness(problem.f, tbar)
    palais_smale = analyzer.palais_smale(problem.f, tbar)
    result = {
        "tbar": tbar,
        "section": section.to_dict(),
        "properness": properness.to_dict(),
        "palais_smale": palais_smale.to_dict(),
    }
    return result, section.verdict == INCONCLUSIVE


def _newton(analyzer, problem, args, run):
    return analyzer.newton(problem.f), False


def _pareto(analyzer, problem, args, run):
    tbar = _sublevel(args, problem, default=np.inf)
    found = analyzer.find(problem.f, tbar)
    kept = {PARETO_VERIFIED_LOCAL, UNVERIFIED}
    points = [p for p in found.points if args.weak or p.kind in kept]
    candidates = analyzer.candidates(problem.f, found)
    result = found.to_dict()
    result["points"] = [p.to_dict() for p in points]
    result["candidates"] = candidates.to_dict()
    return result, False


def _existence(analyzer, problem, args, run):
    report = analyzer.existence(problem.f, _sublevel(args, problem))
    return report.to_dict(), report.verdict == NO_CONCLUSION


HANDLERS: Dict[str, Handler] = {
    "eval": _eval,
    "rabier": _rabier,
    "tangency": _tangency,
    "sublevel": _sublevel_probes,
    "newton": _newton,
    "pareto": _pareto,
    "existence": _existence,
}


def _emit(exporter: ReportExporter, report: Dict[str, Any], run: RunConfig, command: str, stdout: TextIO) -> bool:
    """Validate the report, then write it to --out (json) or standard output."""
    try:
        ReportSchema.validate_report(report)
    except ReportValidationError as e:
        logger.error(f"{e}")
        return False
    if run.output_path is not None and run.output_format == "json" and command != "tangency":
        return exporter.export_json(report, run.output_path)
    stdout.write(exporter.render_json(report))
    stdout.flush()
    return True


def execute(args: argparse.Namespace, stdout: Optional[TextIO] = None) -> int:
    """Run a parsed command; returns the process exit code."""
    stdout = stdout or sys.stdout
    try:
        if needs_map(args.command) and not args.map_path:
            raise UsageError(f"{args.command} needs --map")
        problem = _load(args.map_path) if args.map_path else None
        manager = build_configuration(args, problem)
        run = RunConfig.from_manager(manager, args)
        exporter = ReportExporter(manager)
        budget = {"budgets": run.budgets, "tolerances": run.tolerances}

        if args.command == "catalog":
            try:
                catalog_entries(args.entry)
            except ValueError as e:
                raise UsageError(str(e))
            catalog = run_catalog(manager, run.seed, args.entry, run.threads)
            report = exporter.build_report("catalog", catalog.to_dict(), run.seed, budget)
            if not _emit(exporter, report, run, args.command, stdout):
                return EXIT_FAILURE
            return EXIT_OK if catalog.passed else EXIT_FAILURE

        with ProblemAnalyzer(manager, run.threads) as analyzer:
            result, inconclusive = HANDLERS[args.command](analyzer, problem, args, run)
        report = exporter.build_report(args.command, result, run.seed, budget)
        if not _emit(exporter, report, run, args.command, stdout):
            return EXIT_FAILURE
        return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK

    except _USAGE_ERRORS as e:
        print(f"polypareto {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"Unexpected failure in {args.command}: {e}", exc_info=True)
        return EXIT_FAILURE


def run_command(argv: Sequence[str], stdout: Optional[TextIO] = None) -> int:
    """
    Parse ``argv`` (without the program name) and run the subcommand.

    Returns:
        0 on success, 1 on failure, 2 on parse or configuration errors,
        3 when a probe ends inconclusive (the report is still written)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    return execute(args, stdout)
