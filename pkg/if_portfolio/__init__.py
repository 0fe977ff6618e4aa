"""
Intuitionistic fuzzy multicriteria portfolio selection.

Builds the three portfolio criteria (negated expected return, variance,
negated Sharpe ratio), derives aspiration bounds, turns them into
membership/non-membership goals, scalarizes to a min-max program over
the unit simplex and solves it by projected (sub)gradient descent,
with a brute-force sampling oracle as an independent baseline.
"""

__version__ = "1.0.0"

from .core.exceptions import PortfolioError
from .core.market_model import MarketModel, load_model, load_returns, estimate_model
from .core.objectives import CriterionId, PortfolioWeights

__all__ = [
    'PortfolioError',
    'MarketModel',
    'load_model',
    'load_returns',
    'estimate_model',
    'CriterionId',
    'PortfolioWeights',
    '__version__',
]
