"""
polypareto - existence analysis for polynomial vector optimization problems.

Builds numerical approximations of the critical values and the tangency
values at infinity of a polynomial map, probes the sublevel conditions that
guarantee Pareto solutions, checks Newton-polytope certificates and issues
existence verdicts with the evidence behind them.
"""

__version__ = "1.0.0"
__license__ = "MIT"

# Package metadata
__all__ = [
    "__version__",
    "__license__",
]
