#!/usr/bin/env python3
"""
Intuitionistic fuzzy goals and the min-max scalarization.

Each criterion F_i gets a goal (mu_i, nu_i) over its aspiration interval
[y1, y0]. Writing eta_i = 1 - mu_i, maximizing every membership while
minimizing every non-membership becomes

    min over the simplex of  Phi(x) = max_j c_j(x)

with components c = (eta_1(F_1), ..., eta_k(F_k), nu_1(F_1), ..., nu_k(F_k)).
The crisp baseline keeps only LINEAR eta components, i.e. a Chebyshev
min-max over min-max-normalized criteria.

Features:
- Goal construction with the mu + nu <= 1 grid check
- Exact Phi with its active set and a least-index subgradient
- Log-sum-exp smoothing for the solver's continuation phases
- Vectorized Phi over point clouds for the oracle
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import ConfigError, IFConditionViolated
from ..core.market_model import MarketModel
from ..core.objectives import (
    ALL_CRITERIA, CriterionId, CriterionValues, WeightsLike,
    as_array, evaluate, evaluate_all, evaluate_batch, evaluate_many,
)
from ..optimization.bounds import AspirationBounds
from .shapes import MembershipShape, ShapeKind, ShapeRole

logger = logging.getLogger(__name__)

GRID_POINTS = 1000
IF_TOL = 1e-12
ACTIVE_TOL = 1e-12

ShapeLike = Union[str, MembershipShape]


class ScalarizationMode(str, Enum):
    CRISP = 'crisp'
    FUZZY = 'fuzzy'


class ComponentKind(str, Enum):
    ETA = 'eta'
    NU = 'nu'


@dataclass(frozen=True)
class IFGoal:
    """Membership/non-membership pair of one criterion over [y1, y0]."""

    criterion: CriterionId
    y1: float
    y0: float
    mu: MembershipShape
    nu: MembershipShape

    def mu_value(self, t):
        return self.mu.value(t, self.y1, self.y0)

    def nu_value(self, t):
        return self.nu.value(t, self.y1, self.y0)

    def eta_value(self, t):
        return 1.0 - self.mu.value(t, self.y1, self.y0)

    def mu_derivative(self, t):
        return self.mu.derivative(t, self.y1, self.y0)

    def nu_derivative(self, t):
        return self.nu.derivative(t, self.y1, self.y0)

    def grid(self, points: int = GRID_POINTS) -> np.ndarray:
        return np.linspace(self.y1, self.y0, points)

    def to_dict(self) -> Dict[str, object]:
        return {
            'criterion': self.criterion.key,
            'y1': self.y1,
            'y0': self.y0,
            'mu': self.mu.spec,
            'nu': self.nu.spec,
        }


def check_if_condition(goal: IFGoal, points: int = GRID_POINTS) -> None:
    """
    Verify 0 <= mu(t) + nu(t) <= 1 on an evenly spaced grid of [y1, y0].

    Raises:
        IFConditionViolated: with the grid point of the largest violation,
                             or the first grid point where a level is not finite
    """
    t = goal.grid(points)
    total = goal.mu_value(t) + goal.nu_value(t)
    broken = np.flatnonzero(~np.isfinite(total))
    if broken.size:
        first = int(broken[0])
        raise IFConditionViolated(
            f"{goal.criterion.key}: mu + nu is not finite at t = {t[first]:.6g} "
            f"(mu={goal.mu.spec}, nu={goal.nu.spec})",
            worst_t=float(t[first]), worst_sum=float(total[first]))
    excess = np.maximum(total - 1.0, -total)
    worst = int(np.argmax(excess))
    if excess[worst] > IF_TOL:
        raise IFConditionViolated(
            f"{goal.criterion.key}: mu + nu = {total[worst]:.6g} at t = {t[worst]:.6g} "
            f"(mu={goal.mu.spec}, nu={goal.nu.spec})",
            worst_t=float(t[worst]), worst_sum=float(total[worst]))


def make_goal(c: CriterionId, bounds: AspirationBounds,
              mu_kind: ShapeLike = 'linear', nu_kind: ShapeLike = 'linear') -> IFGoal:
    """
    Build the goal of criterion c from its bounds and two shape specs.

    Raises:
        BadShape: malformed shape or role mismatch
        IFConditionViolated: the pair breaks mu + nu <= 1 on the grid
    """
    c = CriterionId(c)
    entry = bounds[c]
    goal = IFGoal(
        criterion=c,
        y1=entry.y1,
        y0=entry.y0,
        mu=MembershipShape.parse(mu_kind, ShapeRole.MEMBERSHIP),
        nu=MembershipShape.parse(nu_kind, ShapeRole.NONMEMBERSHIP),
    )
    check_if_condition(goal)
    return goal


@dataclass(frozen=True)
class Component:
    kind: ComponentKind
    goal_index: int

    def name(self, goals: Sequence[IFGoal]) -> str:
        return f"{self.kind.value}_{goals[self.goal_index].criterion.key}"


@dataclass(frozen=True, eq=False)
class ScalarizedProblem:
    """
    Immutable min-max problem over the simplex.

    Components are all eta terms in goal order, followed by the nu terms
    (fuzzy mode) or nothing (crisp mode).
    """

    model: MarketModel
    goals: Tuple[IFGoal, ...]
    mode: ScalarizationMode = ScalarizationMode.FUZZY

    def __post_init__(self):
        object.__setattr__(self, 'goals', tuple(self.goals))
        object.__setattr__(self, 'mode', ScalarizationMode(self.mode))
        criteria = [g.criterion for g in self.goals]
        if not criteria or len(set(criteria)) != len(criteria):
            raise ConfigError(f"goals must name distinct criteria, got {[c.key for c in criteria]}")
        if self.mode == ScalarizationMode.CRISP:
            for g in self.goals:
                if g.mu.kind != ShapeKind.LINEAR:
                    raise ConfigError(f"crisp mode uses linear memberships, got {g.mu.spec} "
                                      f"for {g.criterion.key}")
        self._check_ranges()

    def _check_ranges(self) -> None:
        for goal in self.goals:
            t = goal.grid()
            for kind, values in ((ComponentKind.ETA, goal.eta_value(t)),
                                 (ComponentKind.NU, goal.nu_value(t))):
                if (not np.all(np.isfinite(values)) or np.any(values < -IF_TOL)
                        or np.any(values > 1.0 + IF_TOL)):
                    raise ConfigError(f"{kind.value}_{goal.criterion.key} leaves [0, 1]")

    @property
    def components(self) -> Tuple[Component, ...]:
        etas = tuple(Component(ComponentKind.ETA, i) for i in range(len(self.goals)))
        if self.mode == ScalarizationMode.CRISP:
            return etas
        return etas + tuple(Component(ComponentKind.NU, i) for i in range(len(self.goals)))

    @property
    def component_names(self) -> Tuple[str, ...]:
        return tuple(comp.name(self.goals) for comp in self.components)

    @property
    def criteria(self) -> Tuple[CriterionId, ...]:
        return tuple(g.criterion for g in self.goals)

    @property
    def n_components(self) -> int:
        return len(self.components)

    def to_dict(self) -> Dict[str, object]:
        return {
            'mode': self.mode.value,
            'goals': [g.to_dict() for g in self.goals],
            'components': list(self.component_names),
        }


def scalarize(model: MarketModel, bounds: AspirationBounds,
              goal_specs: Optional[Mapping[CriterionId, Tuple[ShapeLike, ShapeLike]]] = None,
              criteria: Iterable[CriterionId] = ALL_CRITERIA,
              mode: Union[str, ScalarizationMode] = ScalarizationMode.FUZZY) -> ScalarizedProblem:
    """
    Assemble the scalarized problem for the given criteria.

    Args:
        model: Market model
        bounds: Aspiration bounds covering every criterion
        goal_specs: criterion -> (mu spec, nu spec); missing criteria use linear/linear
        criteria: Criteria of the problem (MV: E* and V, MVS: all three)
        mode: FUZZY (eta and nu components) or CRISP (linear eta only)
    """
    mode = ScalarizationMode(mode)
    goal_specs = dict(goal_specs or {})
    goals = []
    for c in sorted(set(criteria)):
        mu_kind, nu_kind = goal_specs.get(CriterionId(c), ('linear', 'linear'))
        if mode == ScalarizationMode.CRISP:
            mu_kind, nu_kind = 'linear', 'linear'
        goals.append(make_goal(c, bounds, mu_kind, nu_kind))
    problem = ScalarizedProblem(model=model, goals=tuple(goals), mode=mode)
    logger.debug(f"Scalarized {mode.value} problem with components {problem.component_names}")
    return problem


def chebyshev_problem(model: MarketModel, bounds: AspirationBounds,
                      criteria: Iterable[CriterionId] = ALL_CRITERIA) -> ScalarizedProblem:
    """Crisp baseline: max_i (F_i(x) - y1_i) / (y0_i - y1_i)."""
    return scalarize(model, bounds, criteria=criteria, mode=ScalarizationMode.CRISP)


def _components_and_jacobian(p: ScalarizedProblem, x: np.ndarray,
                             with_jacobian: bool) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    k = len(p.goals)
    fuzzy = p.mode == ScalarizationMode.FUZZY
    F, grads = evaluate_many(p.model, x, p.criteria, with_gradients=with_jacobian)
    values = np.empty(2 * k if fuzzy else k)
    slopes = np.empty_like(values)
    for i, g in enumerate(p.goals):
        mu, mu_slope = g.mu.level_and_slope(F[i], g.y1, g.y0)
        values[i], slopes[i] = 1.0 - mu, -mu_slope
        if fuzzy:
            values[k + i], slopes[k + i] = g.nu.level_and_slope(F[i], g.y1, g.y0)
    if not with_jacobian:
        return values, None
    rows = np.vstack([grads, grads]) if fuzzy else grads
    return values, slopes[:, None] * rows


def component_values(p: ScalarizedProblem, x: WeightsLike) -> np.ndarray:
    """All component values at x, in component order."""
    values, _ = _components_and_jacobian(p, as_array(x), with_jacobian=False)
    return values


def eval_component(p: ScalarizedProblem, j: int, x: WeightsLike) -> float:
    """Value of component j at x, clamped outside [y1, y0]."""
    if not 0 <= j < p.n_components:
        raise IndexError(f"component index {j} outside 0..{p.n_components - 1}")
    comp = p.components[j]
    goal = p.goals[comp.goal_index]
    t = evaluate(p.model, as_array(x), goal.criterion)
    return float(goal.eta_value(t) if comp.kind == ComponentKind.ETA else goal.nu_value(t))


def eval_phi(p: ScalarizedProblem, x: WeightsLike) -> Tuple[float, Tuple[int, ...]]:
    """Phi(x) and every component index within 1e-12 of it."""
    values = component_values(p, x)
    value = float(np.max(values))
    active = tuple(int(j) for j in np.flatnonzero(values >= value - ACTIVE_TOL))
    return value, active


def subgrad_phi(p: ScalarizedProblem, x: WeightsLike) -> np.ndarray:
    """Gradient of the least-index active component."""
    values, J = _components_and_jacobian(p, as_array(x), with_jacobian=True)
    value = np.max(values)
    j_star = int(np.flatnonzero(values >= value - ACTIVE_TOL)[0])
    return J[j_star].copy()


def smooth_phi(p: ScalarizedProblem, x: WeightsLike, tau: float) -> Tuple[float, np.ndarray]:
    """
    Log-sum-exp surrogate tau * log sum_j exp(c_j / tau) and its gradient.

    Phi(x) <= value <= Phi(x) + tau * log(m) for m components.
    """
    if not tau > 0:
        raise ConfigError(f"smoothing temperature must be positive, got {tau!r}")
    values, J = _components_and_jacobian(p, as_array(x), with_jacobian=True)
    top = float(np.max(values))
    weights = np.exp((values - top) / tau)
    total = float(weights.sum())
    return top + tau * float(np.log(total)), (weights / total) @ J


def phi_batch(p: ScalarizedProblem, X: np.ndarray) -> np.ndarray:
    """Phi for every row of X; NaN where the Sharpe ratio is undefined."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    columns = []
    F = [evaluate_batch(p.model, X, g.criterion) for g in p.goals]
    for i, g in enumerate(p.goals):
        columns.append(g.eta_value(F[i]))
    if p.mode == ScalarizationMode.FUZZY:
        for i, g in enumerate(p.goals):
            columns.append(g.nu_value(F[i]))
    stacked = np.column_stack(columns)
    phi = stacked.max(axis=1)
    phi[np.any(np.isnan(np.column_stack(F)), axis=1)] = np.nan
    return phi


class PhiObjective:
    """Phi as a nonsmooth objective handle for the solver."""

    smooth = False

    def __init__(self, problem: ScalarizedProblem):
        self.problem = problem
        self.model = problem.model
        self.name = f"phi_{problem.mode.value}"

    def value(self, x: np.ndarray) -> float:
        return float(np.max(component_values(self.problem, x)))

    def direction(self, x: np.ndarray) -> np.ndarray:
        return subgrad_phi(self.problem, x)

    def smoothed(self, x: np.ndarray, tau: float) -> Tuple[float, np.ndarray]:
        return smooth_phi(self.problem, x, tau)

    def batch(self, X: np.ndarray) -> np.ndarray:
        return phi_batch(self.problem, X)

    def annotate(self, x: np.ndarray) -> Tuple[CriterionValues, np.ndarray]:
        return evaluate_all(self.model, x, self.problem.criteria), component_values(self.problem, x)
