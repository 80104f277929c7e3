#!/usr/bin/env python3
"""
Main entry point for polypareto.
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional

from .cli.commands import EXIT_FAILURE, execute
from .cli.parser import build_parser


LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(log_level: Optional[str] = None, log_file_path: Optional[str] = None) -> None:
    """Configure the root logger; console records go to standard error."""
    from .config.defaults import DEFAULT_CONFIG

    settings = DEFAULT_CONFIG.get('logging', {})
    level_name = (log_level or settings.get('level', 'WARNING')).upper()

    handlers: List[logging.Handler] = []
    # Standard output carries the report
    if settings.get('console_enabled', True):
        handlers.append(logging.StreamHandler(sys.stderr))
    if settings.get('file_enabled', False):
        target = Path(log_file_path or settings.get('file_path', 'polypareto.log'))
        target.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(str(target)))
    if not handlers:
        handlers.append(logging.StreamHandler(sys.stderr))

    logging.basicConfig(level=getattr(logging, level_name), format=LOG_FORMAT, handlers=handlers, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2

    try:
        setup_logging(args.log_level)
    except (OSError, AttributeError) as e:
        print(f"polypareto: cannot set up logging: {e}", file=sys.stderr)
        return EXIT_FAILURE

    logger = logging.getLogger(__name__)
    logger.info(f"Running polypareto {args.command}")
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
