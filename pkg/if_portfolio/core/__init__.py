"""
Market model, criteria, errors and the reporting base class.
"""

from .base_command import BaseCommand
from .market_model import MarketModel, ReturnSeries
from .objectives import CriterionId, CriterionValues, PortfolioWeights

__all__ = ['BaseCommand', 'MarketModel', 'ReturnSeries', 'CriterionId', 'CriterionValues', 'PortfolioWeights']
