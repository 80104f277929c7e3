"""
Command-line argument parser for polypareto.
"""

import argparse

COMMANDS = {
    "eval": "Evaluate the map at a point",
    "rabier": "Rabier function value and attaining weights at a point",
    "tangency": "Estimate the tangency values at infinity",
    "sublevel": "Bounded-section, properness and Palais-Smale probes at a sublevel",
    "newton": "Newton polytopes, faces at infinity and the Khovanskii check",
    "pareto": "Search for Pareto points and candidate Pareto values",
    "existence": "Pareto-solution existence verdict with evidence",
    "catalog": "Run the bundled example catalog",
}

# Subcommands that cannot run without a problem file
_NEEDS_MAP = {"eval", "rabier", "tangency", "sublevel", "newton", "pareto", "existence"}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", dest="map_path", metavar="PATH", help="Problem file (.vp)")
    common.add_argument("--at", metavar="X1,X2,...", help="Point in R^n, comma-separated")
    common.add_argument("--tbar", metavar="T1,T2,...", help="Sublevel in R^m, comma-separated; inf allowed")
    common.add_argument("--seed", type=int, metavar="UINT", help="Random seed")
    common.add_argument("--threads", type=int, metavar="UINT", help="Worker threads (default: machine parallelism)")
    common.add_argument("--radii", metavar="R0,FACTOR,STEPS", help="Tangency radius schedule")
    common.add_argument(
        "--budget", action="append", default=[], metavar="KEY=VALUE",
        help="Budget override, key relative to budgets (repeatable)",
    )
    common.add_argument("--out", metavar="PATH", help="Output file (directory for --format csv)")
    common.add_argument("--format", dest="output_format", choices=["json", "csv"], help="Output format")
    common.add_argument("--config", metavar="PATH", help="General configuration JSON file")
    common.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level (logs go to standard error)",
    )
    common.add_argument("--weak", action="store_true", help="pareto: keep weak_only points")
    common.add_argument("--entry", action="append", metavar="NAME", help="catalog: run only this entry (repeatable)")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per analysis."""
    parser = argparse.ArgumentParser(
        prog="polypareto",
        description="Existence analysis for polynomial vector optimization problems",
    )
    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for name, help_text in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def needs_map(command: str) -> bool:
    return command in _NEEDS_MAP
