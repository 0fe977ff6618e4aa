#!/usr/bin/env python3
"""
Exception hierarchy for the portfolio selection utilities.

Every error carries the process exit code the command-line front end
returns for it, so callers can map failures without a lookup table.
"""

from typing import Optional


class PortfolioError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


class ConfigError(PortfolioError, ValueError):
    """Invalid run configuration, flag value or goal specification."""

    exit_code = 2


class BadShape(ConfigError):
    """A membership shape is malformed (non-monotone table, bad scale, ...)."""


class IFConditionViolated(ConfigError):
    """A membership/non-membership pair breaks 0 <= mu + nu <= 1."""

    def __init__(self, message: str, worst_t: Optional[float] = None,
                 worst_sum: Optional[float] = None):
        super().__init__(message)
        self.worst_t = worst_t
        self.worst_sum = worst_sum


class ModelError(PortfolioError, ValueError):
    """The market model or its raw inputs are invalid."""

    exit_code = 3


class ParseError(ModelError):
    """A model or returns file could not be parsed."""


class InvariantViolation(ModelError):
    """A MarketModel invariant does not hold."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class EmptySeries(ModelError):
    """Fewer than two observations were supplied."""


class NonFiniteInput(ModelError):
    """NaN or infinite value in numeric input."""


class DimensionMismatch(ModelError):
    """Rows, labels or vectors disagree in length."""


class DegenerateAsset(ModelError):
    """An asset has zero (or numerically zero) variance."""

    def __init__(self, message: str, assets: Optional[list] = None):
        super().__init__(message)
        self.assets = assets or []


class ZeroVariance(ModelError):
    """Portfolio variance is too small to evaluate the Sharpe ratio."""


class DegenerateCriterion(PortfolioError):
    """A criterion is constant over the simplex, so y1 >= y0."""

    exit_code = 4

    def __init__(self, message: str, criterion: Optional[str] = None):
        super().__init__(message)
        self.criterion = criterion


class SolverFailure(PortfolioError):
    """No start met the tolerances within the iteration budget."""

    exit_code = 5

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ResourceLimit(PortfolioError):
    """A sample cloud would exceed the configured point cap."""

    exit_code = 6


class AcceptanceFailure(PortfolioError):
    """A hard check of the reproduction run did not pass."""

    def __init__(self, message: str, failed: Optional[list] = None):
        super().__init__(message)
        self.failed = failed or []
