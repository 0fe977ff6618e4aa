#!/usr/bin/env python3
"""
Projected (sub)gradient descent over the unit simplex.

Iterates x <- P(x - alpha * d), where P is the Euclidean projection onto
the simplex and alpha comes from Armijo backtracking with an adaptive
initial trial (the previous accepted step, enlarged once). Smooth
objectives run one phase. Nonsmooth objectives that offer a smoothed
surrogate follow its gradient through a decreasing temperature schedule and
then take subgradient steps in a polish phase. Every phase tests Armijo
decrease on the true objective, and the reported point is always the best
true-objective iterate.

Features:
- Sort-and-threshold simplex projection
- Deterministic multi-start (uniform point, near-vertices, Dirichlet draws)
- Per-start trajectories with termination reasons
"""

import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np

from ..core.exceptions import ConfigError, NonFiniteInput, SolverFailure
from ..core.objectives import (
    CriterionId,
    CriterionValues,
    PortfolioWeights,
    WeightsLike,
    as_array,
    evaluate,
    evaluate_all,
    evaluate_batch,
    gradient,
)
from ..core.market_model import MarketModel

logger = logging.getLogger(__name__)

MIN_STEP = 1e-16
MAX_STEP = 1e6
OBJ_WINDOW = 100
VERTEX_PULL = 1e-3
# smoothed phases stop once steps or objective changes fall below these multiples of tau
SMOOTH_STEP_SCALE = 1e-3
SMOOTH_OBJ_SCALE = 1e-4
SMOOTH_PHASE_ITERS = 500


def default_smoothing_schedule(start: float = 1e-2, stop: float = 1e-6) -> Tuple[float, ...]:
    """Temperatures halving from start down to stop (stop always included)."""
    taus = []
    tau = start
    while tau > stop:
        taus.append(tau)
        tau /= 2.0
    taus.append(stop)
    return tuple(taus)


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for minimize(); all defaults are overridable from settings or flags."""

    max_iters: int = 50000
    tol_step: float = 1e-10
    tol_obj: float = 1e-12
    initial_step: float = 1.0
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    n_starts: int = 16
    smoothing_schedule: Tuple[float, ...] = field(default_factory=default_smoothing_schedule)
    seed: int = 20240601

    def __post_init__(self):
        object.__setattr__(self, 'smoothing_schedule', tuple(float(t) for t in self.smoothing_schedule))
        positive = {
            'max_iters': self.max_iters, 'tol_step': self.tol_step, 'tol_obj': self.tol_obj,
            'initial_step': self.initial_step, 'n_starts': self.n_starts,
        }
        bad = [name for name, value in positive.items() if not value > 0]
        if bad:
            raise ConfigError(f"Solver settings must be positive: {bad}")
        for name in ('backtrack_factor', 'armijo_c'):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1), got {getattr(self, name)}")
        if not self.smoothing_schedule or any(not t > 0 for t in self.smoothing_schedule):
            raise ConfigError("smoothing_schedule must be a non-empty sequence of positive temperatures")

    def with_overrides(self, **overrides: Any) -> 'SolverConfig':
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@runtime_checkable
class Objective(Protocol):
    """
    Objective handle consumed by minimize().

    value(x) is the true objective; direction(x) its gradient or a
    subgradient. Handles of nonsmooth objectives additionally expose
    smoothed(x, tau) -> (value, gradient) and set `smooth = False`.
    """

    smooth: bool

    def value(self, x: np.ndarray) -> float: ...

    def direction(self, x: np.ndarray) -> np.ndarray: ...


class CriterionObjective:
    """Single criterion of a market model as a smooth objective handle."""

    smooth = True

    def __init__(self, model: MarketModel, criterion: CriterionId):
        self.model = model
        self.criterion = criterion
        self.name = CriterionId(criterion).key

    def value(self, x: np.ndarray) -> float:
        return evaluate(self.model, x, self.criterion)

    def direction(self, x: np.ndarray) -> np.ndarray:
        return gradient(self.model, x, self.criterion)

    def batch(self, X: np.ndarray) -> np.ndarray:
        return evaluate_batch(self.model, X, self.criterion)

    def annotate(self, x: np.ndarray) -> Tuple[Optional[CriterionValues], Optional[np.ndarray]]:
        return evaluate_all(self.model, x), None


@dataclass(frozen=True)
class StartTrajectory:
    """Outcome of one descent run."""

    start: np.ndarray
    final_point: np.ndarray
    iterations: int
    final_value: float
    termination: str
    phases: Tuple[Tuple[str, int, str], ...] = ()

    @property
    def converged(self) -> bool:
        return self.termination != 'max_iters'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'start': self.start.tolist(),
            'final_point': self.final_point.tolist(),
            'iterations': self.iterations,
            'final_value': self.final_value,
            'termination': self.termination,
            'phases': [{'phase': name, 'iterations': its, 'termination': why}
                       for name, its, why in self.phases],
        }


@dataclass(frozen=True)
class SolveReport:
    """Best point over all starts plus the per-start record."""

    x_star: PortfolioWeights
    objective: float
    trajectories: Tuple[StartTrajectory, ...]
    converged: bool
    best_start: int
    criterion_values: Optional[CriterionValues] = None
    membership_levels: Optional[np.ndarray] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x_star': self.x_star.tolist(),
            'objective': self.objective,
            'converged': self.converged,
            'best_start': self.best_start,
            'criterion_values': None if self.criterion_values is None else self.criterion_values.to_dict(),
            'membership_levels': None if self.membership_levels is None else self.membership_levels.tolist(),
            'trajectories': [t.to_dict() for t in self.trajectories],
        }


def project_simplex(v: WeightsLike) -> PortfolioWeights:
    """
    Euclidean projection of v onto {x >= 0, sum(x) = 1}.

    Sort v descending, find the largest rho with
    u_rho + (1 - sum_{j<=rho} u_j) / rho > 0, shift by that threshold and
    clip at zero.
    """
    return PortfolioWeights(_project(as_array(v)))


def _project(v: np.ndarray) -> np.ndarray:
    if v.ndim != 1 or v.size < 2:
        raise ConfigError(f"projection needs a vector of length >= 2, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("cannot project a vector with non-finite entries")
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u)
    ranks = np.arange(1, v.size + 1)
    candidates = u + (1.0 - cumulative) / ranks > 0
    rho = int(np.nonzero(candidates)[0][-1])
    theta = (1.0 - cumulative[rho]) / (rho + 1)
    x = np.maximum(v + theta, 0.0)
    # one renormalization pass absorbs the rounding of the threshold
    return x / x.sum()


def default_starts(n: int, n_starts: int, seed: int) -> List[PortfolioWeights]:
    """
    Deterministic start points: the uniform portfolio, then the vertices
    pulled 1e-3 toward the center (lowest index first), then Dirichlet(1)
    draws from a generator seeded with `seed`.
    """
    if n < 2:
        raise ConfigError(f"need at least 2 assets, got {n}")
    if n_starts < 1:
        raise ConfigError(f"n_starts must be positive, got {n_starts}")
    center = np.full(n, 1.0 / n)
    starts = [PortfolioWeights(center)]
    for k in range(min(n, n_starts - 1)):
        point = VERTEX_PULL * center
        point[k] += 1.0 - VERTEX_PULL
        starts.append(PortfolioWeights(point / point.sum()))
    remaining = n_starts - len(starts)
    if remaining > 0:
        rng = np.random.default_rng(seed)
        for row in rng.dirichlet(np.ones(n), size=remaining):
            starts.append(PortfolioWeights(row / row.sum()))
    return starts


def _run_phase(x: np.ndarray, value: Callable[[np.ndarray], float],
               direction: Callable[[np.ndarray], np.ndarray], budget: int,
               cfg: SolverConfig, best: List[Any],
               tol_step: float, tol_obj: float) -> Tuple[np.ndarray, int, str]:
    """
    Run projected descent along one direction field.

    Every trial step is tested for Armijo decrease on the true objective
    `value`, whichever field supplies the direction, so accepted iterates
    never raise the true objective. The direction is only evaluated at
    accepted iterates. `best` is a [point, value] pair updated in place.
    """
    alpha = cfg.initial_step
    f = value(x)
    d = direction(x)
    window = deque([f], maxlen=OBJ_WINDOW + 1)

    for iteration in range(1, budget + 1):
        norm = float(np.linalg.norm(d))
        if norm > 1.0:
            d = d / norm

        alpha = min(alpha / cfg.backtrack_factor, MAX_STEP)
        while True:
            x_new = _project(x - alpha * d)
            f_new = value(x_new)
            if f_new <= f + cfg.armijo_c * float(d @ (x_new - x)):
                break
            alpha *= cfg.backtrack_factor
            if alpha < MIN_STEP:
                return x, iteration - 1, 'no_descent'

        step = float(np.max(np.abs(x_new - x)))
        x, f = x_new, f_new
        if f < best[1]:
            best[0], best[1] = x.copy(), f

        if step <= tol_step:
            return x, iteration, 'step'
        window.append(f)
        if len(window) == window.maxlen and abs(window[0] - window[-1]) <= tol_obj:
            return x, iteration, 'objective'
        d = direction(x)
    return x, budget, 'max_iters'


def _descend(obj: Objective, start: np.ndarray, cfg: SolverConfig) -> StartTrajectory:
    x = start.copy()
    best: List[Any] = [x.copy(), obj.value(x)]
    phases = []
    total = 0

    if obj.smooth:
        x, its, why = _run_phase(x, obj.value, obj.direction, cfg.max_iters, cfg, best,
                                 cfg.tol_step, cfg.tol_obj)
        phases.append(('gradient', its, why))
        total += its
    else:
        n_phases = len(cfg.smoothing_schedule) + 1
        budget = max(cfg.max_iters // n_phases, OBJ_WINDOW + 1)
        for tau in cfg.smoothing_schedule:
            def smoothed_direction(z, tau=tau):
                return obj.smoothed(z, tau)[1]

            x, its, why = _run_phase(x, obj.value, smoothed_direction,
                                     min(budget, SMOOTH_PHASE_ITERS), cfg, best,
                                     max(cfg.tol_step, SMOOTH_STEP_SCALE * tau),
                                     max(cfg.tol_obj, SMOOTH_OBJ_SCALE * tau))
            phases.append((f'smooth(tau={tau:.3g})', its, why))
            total += its
        # polish from the best true iterate found so far
        x, its, why = _run_phase(best[0].copy(), obj.value, obj.direction, budget, cfg, best,
                                 cfg.tol_step, cfg.tol_obj)
        phases.append(('polish', its, why))
        total += its

    final_value = float(obj.value(best[0]))
    logger.debug(f"Start finished after {total} iterations ({why}), value={final_value:.12g}")
    return StartTrajectory(
        start=start.copy(),
        final_point=best[0].copy(),
        iterations=total,
        final_value=final_value,
        termination=why,
        phases=tuple(phases),
    )


def minimize(obj: Objective, cfg: Optional[SolverConfig] = None,
             starts: Optional[Sequence[WeightsLike]] = None,
             n_assets: Optional[int] = None, strict: bool = True) -> SolveReport:
    """
    Minimize obj over the unit simplex from several starts.

    Args:
        obj: Objective handle (see Objective)
        cfg: Solver configuration, defaults to SolverConfig()
        starts: Explicit start points; default_starts() when omitted
        n_assets: Dimension, required only when starts is omitted and obj
                  has no `model` attribute
        strict: Raise SolverFailure when no start converged

    Returns:
        SolveReport for the best start (ties go to the lowest start index)

    Raises:
        SolverFailure: every start exhausted max_iters (strict mode); the
                       report is attached to the exception
    """
    cfg = cfg or SolverConfig()
    if starts is None:
        n = n_assets or getattr(getattr(obj, 'model', None), 'n_assets', None)
        if n is None:
            raise ConfigError("minimize() needs starts or the problem dimension")
        starts = default_starts(n, cfg.n_starts, cfg.seed)
    start_arrays = [as_array(s).astype(float) for s in starts]
    if not start_arrays:
        raise ConfigError("minimize() needs at least one start")

    trajectories = tuple(_descend(obj, _project(s), cfg) for s in start_arrays)
    values = [t.final_value for t in trajectories]
    best_start = int(np.argmin(values))
    best = trajectories[best_start]
    x_star = PortfolioWeights(best.final_point)
    converged = any(t.converged for t in trajectories)

    criterion_values, levels = (None, None)
    if hasattr(obj, 'annotate'):
        criterion_values, levels = obj.annotate(x_star.weights)

    report = SolveReport(
        x_star=x_star,
        objective=float(obj.value(x_star.weights)),
        trajectories=trajectories,
        converged=converged,
        best_start=best_start,
        criterion_values=criterion_values,
        membership_levels=levels,
    )
    spread = max(values) - min(values)
    logger.info(f"Solved over {len(trajectories)} starts: best={report.objective:.12g} "
                f"(start {best_start}), spread={spread:.3e}, converged={converged}")

    if not converged:
        logger.warning("All starts exhausted the iteration budget")
        if strict:
            raise SolverFailure(f"No start converged within {cfg.max_iters} iterations", report)
    return report
