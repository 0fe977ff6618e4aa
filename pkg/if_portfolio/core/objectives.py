#!/usr/bin/env python3
"""
The three portfolio criteria and their gradients.

All criteria are written for minimization:

    E*(x)  = -L^T x                         negated expected return
    V(x)   = x^T Q x                        variance
    Sr*(x) = -(L^T x - p_rf) / sqrt(V(x))   negated Sharpe ratio

E* is linear and V is convex; Sr* is pseudoconvex on the simplex whenever
L^T x > p_rf, since a positive linear function over a positive convex one
is pseudoconcave. Local minima of all three are therefore global.
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import DimensionMismatch, InvariantViolation, NonFiniteInput, ZeroVariance
from .market_model import MarketModel

logger = logging.getLogger(__name__)

SIMPLEX_SUM_TOL = 1e-9
ZERO_VARIANCE = 1e-16


class CriterionId(IntEnum):
    """Criteria of the tri-criteria problem, in their fixed order."""

    NEG_EXPECTED_RETURN = 0
    VARIANCE = 1
    NEG_SHARPE = 2

    @property
    def key(self) -> str:
        return self.name.lower()

    @classmethod
    def from_key(cls, key: str) -> 'CriterionId':
        try:
            return cls[key.strip().upper()]
        except KeyError as e:
            raise ValueError(f"Unknown criterion '{key}'; expected one of "
                             f"{[c.key for c in cls]}") from e


ALL_CRITERIA: Tuple[CriterionId, ...] = tuple(CriterionId)


@dataclass(frozen=True, eq=False)
class PortfolioWeights:
    """A point of the unit simplex: nonnegative weights summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 2:
            raise DimensionMismatch(f"weights must be a vector of length >= 2, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise NonFiniteInput("weights contain non-finite values")
        if np.any(w < 0.0):
            raise InvariantViolation('simplex', f"negative weight {w.min()!r}")
        if abs(w.sum() - 1.0) > SIMPLEX_SUM_TOL:
            raise InvariantViolation('simplex', f"weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, 'weights', w)

    def __len__(self) -> int:
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def tolist(self):
        return self.weights.tolist()

    @classmethod
    def uniform(cls, n: int) -> 'PortfolioWeights':
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def vertex(cls, n: int, k: int) -> 'PortfolioWeights':
        w = np.zeros(n)
        w[k] = 1.0
        return cls(w)


WeightsLike = Union[PortfolioWeights, np.ndarray, Iterable[float]]


def as_array(x: WeightsLike) -> np.ndarray:
    """Plain float vector view of a weights-like value (no simplex check)."""
    if isinstance(x, PortfolioWeights):
        return x.weights
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class CriterionValues:
    """E*, V and Sr* evaluated at one portfolio (Sr* is None for MV runs)."""

    neg_expected_return: float
    variance: float
    neg_sharpe: Union[float, None]

    @property
    def expected_return(self) -> float:
        return -self.neg_expected_return

    @property
    def sharpe(self) -> Union[float, None]:
        return None if self.neg_sharpe is None else -self.neg_sharpe

    def __getitem__(self, c: CriterionId) -> float:
        return (self.neg_expected_return, self.variance, self.neg_sharpe)[int(c)]

    def to_dict(self) -> Dict[str, Union[float, None]]:
        return {
            'neg_expected_return': self.neg_expected_return,
            'variance': self.variance,
            'neg_sharpe': self.neg_sharpe,
        }


def _check_length(model: MarketModel, x: np.ndarray) -> None:
    if x.shape[-1] != model.n_assets:
        raise DimensionMismatch(f"portfolio has {x.shape[-1]} weights, model has {model.n_assets} assets")


def evaluate(model: MarketModel, x: WeightsLike, c: CriterionId) -> float:
    """
    Evaluate criterion c at x.

    Raises:
        ZeroVariance: x^T Q x <= 1e-16 when the Sharpe criterion is requested
    """
    x = as_array(x)
    _check_length(model, x)
    if c == CriterionId.NEG_EXPECTED_RETURN:
        return float(-(model.mean_returns @ x))
    variance = float(x @ model.covariance @ x)
    if c == CriterionId.VARIANCE:
        return variance
    if variance <= ZERO_VARIANCE:
        raise ZeroVariance(f"portfolio variance {variance:.3e} too small for the Sharpe ratio")
    return float(-(model.mean_returns @ x - model.risk_free_rate) / np.sqrt(variance))


def gradient(model: MarketModel, x: WeightsLike, c: CriterionId) -> np.ndarray:
    """
    Gradient of criterion c at x (on R^n, not projected onto the simplex).

        grad E*  = -L
        grad V   = 2 Q x
        grad Sr* = -(L / sqrt(V) - (L^T x - p_rf) Q x / V^(3/2))
    """
    x = as_array(x)
    _check_length(model, x)
    L = model.mean_returns
    if c == CriterionId.NEG_EXPECTED_RETURN:
        return -L.copy()
    Qx = model.covariance @ x
    if c == CriterionId.VARIANCE:
        return 2.0 * Qx
    variance = float(x @ Qx)
    if variance <= ZERO_VARIANCE:
        raise ZeroVariance(f"portfolio variance {variance:.3e} too small for the Sharpe ratio")
    sd = np.sqrt(variance)
    excess = float(L @ x) - model.risk_free_rate
    return -(L / sd - excess * Qx / (variance * sd))


def evaluate_many(model: MarketModel, x: WeightsLike, criteria: Sequence[CriterionId],
                  with_gradients: bool = True) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Values (and gradient rows) of several criteria at one point.

    Shares Q x, L^T x and V between the criteria; results match evaluate()
    and gradient() called one criterion at a time.

    Raises:
        ZeroVariance: x^T Q x <= 1e-16 and the Sharpe criterion is requested
    """
    x = as_array(x)
    _check_length(model, x)
    L = model.mean_returns
    Qx = model.covariance @ x
    mean = float(L @ x)
    variance = float(x @ Qx)
    values = np.empty(len(criteria))
    grads = np.empty((len(criteria), x.size)) if with_gradients else None
    for i, c in enumerate(criteria):
        if c == CriterionId.NEG_EXPECTED_RETURN:
            values[i] = -mean
            if with_gradients:
                grads[i] = -L
        elif c == CriterionId.VARIANCE:
            values[i] = variance
            if with_gradients:
                grads[i] = 2.0 * Qx
        else:
            if variance <= ZERO_VARIANCE:
                raise ZeroVariance(f"portfolio variance {variance:.3e} too small for the Sharpe ratio")
            sd = np.sqrt(variance)
            excess = mean - model.risk_free_rate
            values[i] = -excess / sd
            if with_gradients:
                grads[i] = -(L / sd - excess * Qx / (variance * sd))
    return values, grads


def evaluate_all(model: MarketModel, x: WeightsLike,
                 criteria: Iterable[CriterionId] = ALL_CRITERIA) -> CriterionValues:
    """Evaluate the requested criteria; unrequested Sharpe is reported as None."""
    criteria = set(criteria)
    return CriterionValues(
        neg_expected_return=evaluate(model, x, CriterionId.NEG_EXPECTED_RETURN),
        variance=evaluate(model, x, CriterionId.VARIANCE),
        neg_sharpe=(evaluate(model, x, CriterionId.NEG_SHARPE)
                    if CriterionId.NEG_SHARPE in criteria else None),
    )


def evaluate_batch(model: MarketModel, X: np.ndarray, c: CriterionId) -> np.ndarray:
    """
    Evaluate criterion c for every row of X (m x n).

    Rows whose variance is <= 1e-16 yield NaN for the Sharpe criterion
    instead of raising, so callers can count and skip them.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _check_length(model, X)
    if c == CriterionId.NEG_EXPECTED_RETURN:
        return -(X @ model.mean_returns)
    variance = np.einsum('ij,jk,ik->i', X, model.covariance, X)
    if c == CriterionId.VARIANCE:
        return variance
    values = np.full(X.shape[0], np.nan)
    ok = variance > ZERO_VARIANCE
    values[ok] = -(X[ok] @ model.mean_returns - model.risk_free_rate) / np.sqrt(variance[ok])
    return values


def pseudoconvexity_witness(model: MarketModel, c: CriterionId,
                            x1: WeightsLike, x2: WeightsLike,
                            tol: float = 1e-12) -> bool:
    """
    Check the pseudoconvexity implication at one pair of points:

        f(x2) < f(x1)  =>  <grad f(x1), x2 - x1> < 0

    The antecedent is read as f(x2) < f(x1) - tol so that ties within
    rounding error count as vacuous. Meant for randomized property checks.
    """
    x1, x2 = as_array(x1), as_array(x2)
    f1 = evaluate(model, x1, c)
    f2 = evaluate(model, x2, c)
    if not f2 < f1 - tol:
        return True
    return float(gradient(model, x1, c) @ (x2 - x1)) < 0.0
