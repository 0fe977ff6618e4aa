"""
Configuration management for runs and environment settings.
"""

from .run_config import ProblemKind, RunConfig
from .settings import PortfolioSettings, settings

__all__ = ['PortfolioSettings', 'ProblemKind', 'RunConfig', 'settings']
