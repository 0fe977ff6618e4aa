#!/usr/bin/env python3
"""
Aspiration bounds for the fuzzy goals.

For each criterion F_i the aspiration level y1 is the minimum of F_i over
the simplex and the reservation level y0 an upper bound of its maximum.
The maxima are taken exactly at the vertices: E* is linear, V is convex
and Sr (whenever every asset beats the risk-free rate) is quasiconcave, so
each attains its extreme over a polytope at a vertex.

Features:
- Closed-form minimum for E*, multi-start projected gradient for V and Sr*
- Exact vertex maxima with lowest-index tie-breaking
- Degenerate-criterion detection (y1 >= y0)
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np

from ..core.exceptions import DegenerateCriterion
from ..core.market_model import MarketModel
from ..core.objectives import ALL_CRITERIA, CriterionId, PortfolioWeights, evaluate
from .solver import CriterionObjective, SolverConfig, default_starts, minimize

logger = logging.getLogger(__name__)

BOUNDS_STARTS = 8


@dataclass(frozen=True)
class CriterionBounds:
    """y_min/y_max of one criterion and where they are attained."""

    criterion: CriterionId
    y_min: float
    y_max: float
    argmin: PortfolioWeights
    argmax_vertex: Optional[int]

    @property
    def y1(self) -> float:
        return self.y_min

    @property
    def y0(self) -> float:
        return self.y_max

    @property
    def width(self) -> float:
        return self.y_max - self.y_min

    def to_dict(self) -> Dict[str, Any]:
        return {
            'criterion': self.criterion.key,
            'y_min': self.y_min,
            'y_max': self.y_max,
            'y1': self.y1,
            'y0': self.y0,
            'argmin': self.argmin.tolist(),
            'argmax_vertex': self.argmax_vertex,
        }


@dataclass(frozen=True)
class AspirationBounds:
    """Bounds for the criteria of one problem, in criterion order."""

    entries: Tuple[CriterionBounds, ...]

    def __getitem__(self, c: CriterionId) -> CriterionBounds:
        for entry in self.entries:
            if entry.criterion == c:
                return entry
        raise KeyError(f"No bounds computed for {CriterionId(c).key}")

    def __contains__(self, c: CriterionId) -> bool:
        return any(entry.criterion == c for entry in self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def criteria(self) -> Tuple[CriterionId, ...]:
        return tuple(entry.criterion for entry in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {entry.criterion.key: entry.to_dict() for entry in self.entries}


def vertex_values(model: MarketModel, c: CriterionId) -> np.ndarray:
    """Value of criterion c at each vertex e_k of the simplex."""
    L = model.mean_returns
    diagonal = np.diag(model.covariance)
    if c == CriterionId.NEG_EXPECTED_RETURN:
        return -L.copy()
    if c == CriterionId.VARIANCE:
        return diagonal.copy()
    return -(L - model.risk_free_rate) / np.sqrt(diagonal)


def minimize_criterion(model: MarketModel, c: CriterionId,
                       cfg: Optional[SolverConfig] = None) -> Tuple[PortfolioWeights, float]:
    """
    Solve min F_c(x) over the simplex.

    E* is minimized in closed form at the vertex of the largest mean
    return. V and Sr* are pseudoconvex, so any local minimum found by
    projected gradient is global; 8 starts guard against boundary stalls.
    """
    if c == CriterionId.NEG_EXPECTED_RETURN:
        k = int(np.argmax(model.mean_returns))
        x = PortfolioWeights.vertex(model.n_assets, k)
        return x, evaluate(model, x, c)

    cfg = replace(cfg or SolverConfig(), n_starts=BOUNDS_STARTS)
    starts = default_starts(model.n_assets, BOUNDS_STARTS, cfg.seed)
    report = minimize(CriterionObjective(model, c), cfg, starts=starts)
    logger.debug(f"min {c.key} = {report.objective:.12g} at {np.round(report.x_star.weights, 6)}")
    return report.x_star, report.objective


def maximize_criterion_bound(model: MarketModel, c: CriterionId,
                             cfg: Optional[SolverConfig] = None) -> float:
    """
    Upper bound of max F_c(x) over the simplex.

    Exact vertex maximum for all three criteria. For Sr* the vertex rule
    needs L_k > p_rf for every asset; otherwise the bound is widened to
    cover -(min_k L_k - p_rf) / sqrt(min V), which is always valid.
    """
    bound = float(np.max(vertex_values(model, c)))
    if c == CriterionId.NEG_SHARPE:
        worst_excess = float(np.min(model.mean_returns)) - model.risk_free_rate
        if worst_excess <= 0.0:
            _, min_variance = minimize_criterion(model, CriterionId.VARIANCE, cfg)
            fallback = -worst_excess / np.sqrt(min_variance)
            logger.warning(f"Asset returns below p_rf; Sharpe bound widened from "
                           f"{bound:.6g} to {max(bound, fallback):.6g}")
            bound = max(bound, float(fallback))
    return bound


def criterion_bounds(model: MarketModel, c: CriterionId,
                     cfg: Optional[SolverConfig] = None) -> CriterionBounds:
    """Compute and validate the (y1, y0) pair of one criterion."""
    argmin, y_min = minimize_criterion(model, c, cfg)
    y_max = maximize_criterion_bound(model, c, cfg)
    values = vertex_values(model, c)
    argmax_vertex = int(np.argmax(values)) if y_max == float(np.max(values)) else None

    if not y_min < y_max:
        raise DegenerateCriterion(
            f"{c.key} is constant over the simplex (y1={y_min!r} >= y0={y_max!r})", c.key)
    return CriterionBounds(criterion=c, y_min=y_min, y_max=y_max,
                           argmin=argmin, argmax_vertex=argmax_vertex)


def compute_bounds(model: MarketModel, criteria: Iterable[CriterionId] = ALL_CRITERIA,
                   cfg: Optional[SolverConfig] = None) -> AspirationBounds:
    """
    Assemble AspirationBounds (y1 = y_min, y0 = y_max) for the criteria.

    Raises:
        DegenerateCriterion: some criterion has y1 >= y0
    """
    entries = []
    for c in sorted(set(criteria)):
        entry = criterion_bounds(model, CriterionId(c), cfg)
        logger.info(f"Bounds for {entry.criterion.key}: y1={entry.y1:.8g}, y0={entry.y0:.8g}")
        entries.append(entry)
    return AspirationBounds(entries=tuple(entries))
