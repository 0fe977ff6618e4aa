#!/usr/bin/env python3
"""
Brute-force baseline over dense samples of the unit simplex.

The oracle evaluates an objective at every point of a sample cloud and
keeps the best one. It bounds optima from above, it does not certify
them: a solver result must never be beaten by the cloud, and the gap the
other way shrinks as the cloud gets denser.

Clouds:
- DIRICHLET(alpha=1, count, seed): uniform draws, reproducible per seed
- GRID(m): every composition of m into n parts scaled by 1/m,
  C(m+n-1, n-1) points
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Optional

import numpy as np

from ..core.exceptions import ConfigError, ResourceLimit, ZeroVariance
from ..core.market_model import MarketModel
from ..core.objectives import (
    ALL_CRITERIA, CriterionId, PortfolioWeights, WeightsLike,
    as_array, evaluate, evaluate_batch,
)

logger = logging.getLogger(__name__)

DEFAULT_POINT_CAP = 10_000_000
DEFAULT_SEED = 20240601
CHUNK_SIZE = 100_000


class SchemeKind(str, Enum):
    DIRICHLET = 'dirichlet'
    GRID = 'grid'


@dataclass(frozen=True)
class SamplingScheme:
    """How a cloud is drawn; see module docstring."""

    kind: SchemeKind
    count: int = 0
    seed: int = DEFAULT_SEED
    resolution: int = 0
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', SchemeKind(self.kind))
        if self.kind == SchemeKind.DIRICHLET and self.count < 1:
            raise ConfigError(f"Dirichlet sample count must be >= 1, got {self.count}")
        if self.kind == SchemeKind.GRID and self.resolution < 1:
            raise ConfigError(f"grid resolution must be >= 1, got {self.resolution}")
        if not self.alpha > 0:
            raise ConfigError(f"Dirichlet concentration must be positive, got {self.alpha}")

    @classmethod
    def dirichlet(cls, count: int, seed: int = DEFAULT_SEED) -> 'SamplingScheme':
        return cls(SchemeKind.DIRICHLET, count=int(count), seed=int(seed))

    @classmethod
    def grid(cls, resolution: int) -> 'SamplingScheme':
        return cls(SchemeKind.GRID, resolution=int(resolution))

    def size(self, n: int) -> int:
        """Number of points the scheme yields in dimension n."""
        if self.kind == SchemeKind.GRID:
            return grid_size(self.resolution, n)
        return self.count

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == SchemeKind.GRID:
            return {'kind': self.kind.value, 'resolution': self.resolution}
        return {'kind': self.kind.value, 'count': self.count, 'seed': self.seed, 'alpha': self.alpha}


def grid_size(m: int, n: int) -> int:
    return math.comb(m + n - 1, n - 1)


def _grid_points(m: int, n: int) -> np.ndarray:
    # stars and bars: n-1 bar positions among m+n-1 slots
    bars = np.array(list(itertools.combinations(range(m + n - 1), n - 1)), dtype=np.int64)
    bars = bars.reshape(-1, n - 1)
    edges = np.hstack([
        np.full((bars.shape[0], 1), -1, dtype=np.int64),
        bars,
        np.full((bars.shape[0], 1), m + n - 1, dtype=np.int64),
    ])
    return (np.diff(edges, axis=1) - 1) / m


@dataclass(frozen=True, eq=False)
class SampleCloud:
    """Sampled simplex points as rows of a read-only matrix."""

    scheme: SamplingScheme
    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        points.setflags(write=False)
        object.__setattr__(self, 'points', points)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def n_assets(self) -> int:
        return self.points.shape[1]

    def point(self, i: int) -> PortfolioWeights:
        return PortfolioWeights(self.points[i])

    def chunks(self, size: int = CHUNK_SIZE) -> Iterable[np.ndarray]:
        for lo in range(0, len(self), size):
            yield self.points[lo:lo + size]


def sample(scheme: SamplingScheme, n: int, cap: int = DEFAULT_POINT_CAP) -> SampleCloud:
    """
    Draw a cloud of `scheme` in dimension n.

    Raises:
        ResourceLimit: the cloud would exceed `cap` points
    """
    if n < 2:
        raise ConfigError(f"simplex dimension must be >= 2, got {n}")
    size = scheme.size(n)
    if size > cap:
        raise ResourceLimit(f"{scheme.kind.value} cloud of {size} points exceeds the cap of {cap}")

    if scheme.kind == SchemeKind.GRID:
        points = _grid_points(scheme.resolution, n)
    else:
        rng = np.random.default_rng(scheme.seed)
        points = rng.dirichlet(np.full(n, scheme.alpha), size=scheme.count)
    logger.info(f"Sampled {len(points)} points ({scheme.kind.value}) in dimension {n}")
    return SampleCloud(scheme=scheme, points=points)


@dataclass(frozen=True)
class OracleResult:
    """Best cloud point of one objective."""

    objective: str
    scheme: SamplingScheme
    x_best: PortfolioWeights
    value: float
    evaluated: int
    skipped: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scheme': self.scheme.kind.value,
            'seed': self.scheme.seed if self.scheme.kind == SchemeKind.DIRICHLET else None,
            'resolution': self.scheme.resolution if self.scheme.kind == SchemeKind.GRID else None,
            'objective': self.objective,
            'best_point': self.x_best.tolist(),
            'best_value': self.value,
            'evaluated': self.evaluated,
            'skipped': self.skipped,
        }


def _batch_evaluator(obj) -> Callable[[np.ndarray], np.ndarray]:
    if hasattr(obj, 'batch'):
        return obj.batch

    def rowwise(X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            try:
                out[i] = obj.value(row)
            except ZeroVariance:
                out[i] = np.nan
        return out
    return rowwise


def oracle_min(obj, cloud: SampleCloud, name: Optional[str] = None) -> OracleResult:
    """
    Exhaustively evaluate obj over the cloud; ties go to the first point.

    obj is any handle with value(x), optionally batch(X). Points where the
    objective is undefined (zero variance under the Sharpe ratio) are
    skipped and counted.

    Raises:
        ZeroVariance: the objective is undefined at every point
    """
    batch = _batch_evaluator(obj)
    values = np.concatenate([batch(chunk) for chunk in cloud.chunks()])
    skipped = int(np.count_nonzero(np.isnan(values)))
    if skipped == len(values):
        raise ZeroVariance("objective undefined at every cloud point")
    best = int(np.nanargmin(values))
    if skipped:
        logger.warning(f"Skipped {skipped} cloud points with undefined objective")

    result = OracleResult(
        objective=name or getattr(obj, 'name', obj.__class__.__name__),
        scheme=cloud.scheme,
        x_best=cloud.point(best),
        value=float(values[best]),
        evaluated=len(values) - skipped,
        skipped=skipped,
    )
    logger.info(f"Oracle min of {result.objective} over {len(values)} points: {result.value:.12g}")
    return result


def dominating_points(model: MarketModel, x: WeightsLike, cloud: SampleCloud,
                      eps: float, criteria: Iterable[CriterionId] = ALL_CRITERIA) -> np.ndarray:
    """Indices of cloud points improving every criterion on x by more than eps."""
    x = as_array(x)
    criteria = sorted(set(criteria))
    reference = np.array([evaluate(model, x, c) for c in criteria])
    found = []
    offset = 0
    for chunk in cloud.chunks():
        better = np.ones(chunk.shape[0], dtype=bool)
        for c, ref in zip(criteria, reference):
            # NaN (undefined Sharpe) never counts as an improvement
            better &= evaluate_batch(model, chunk, c) < ref - eps
        found.append(np.flatnonzero(better) + offset)
        offset += chunk.shape[0]
    return np.concatenate(found) if found else np.empty(0, dtype=int)


def check_weak_pareto(model: MarketModel, x: WeightsLike, cloud: SampleCloud,
                      eps: float = 1e-6, criteria: Iterable[CriterionId] = ALL_CRITERIA) -> bool:
    """True iff no cloud point strictly improves all criteria by more than eps."""
    dominators = dominating_points(model, x, cloud, eps, criteria)
    if dominators.size:
        logger.info(f"{dominators.size} cloud points dominate the candidate, first at index {dominators[0]}")
    return dominators.size == 0
