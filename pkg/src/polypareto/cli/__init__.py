"""
Command-line interface for polypareto.
"""

from .commands import RunConfig, run_command

__all__ = ["RunConfig", "run_command"]
