#!/usr/bin/env python3
"""
End-to-end portfolio selection: bounds, goals, scalarization, solve.

Shared by the CLI commands, the reproduce-paper command and the dashboard.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

from .core.market_model import MarketModel
from .core.objectives import CriterionId, CriterionValues, PortfolioWeights
from .fuzzy.scalarization import (
    PhiObjective, ScalarizationMode, ScalarizedProblem, ShapeLike, scalarize,
)
from .optimization.bounds import AspirationBounds, compute_bounds
from .optimization.solver import SolveReport, SolverConfig, minimize
from .validation.oracle import (
    DEFAULT_POINT_CAP, DEFAULT_SEED, SamplingScheme, check_weak_pareto, grid_size, oracle_min, sample,
)

logger = logging.getLogger(__name__)

NEVER_BEATEN_TOL = 1e-9
RESOLUTION_TOL = 1e-3
PARETO_EPS = 1e-6


@dataclass(frozen=True)
class PortfolioRun:
    """Everything one solve produced."""

    model: MarketModel
    bounds: AspirationBounds
    problem: ScalarizedProblem
    report: SolveReport

    @property
    def criteria(self) -> Tuple[CriterionId, ...]:
        return self.problem.criteria

    @property
    def x_star(self) -> PortfolioWeights:
        return self.report.x_star

    @property
    def values(self) -> CriterionValues:
        return self.report.criterion_values

    def solution_row(self) -> Dict[str, Optional[float]]:
        """E, V (and Sr for three-criteria runs) at the solution."""
        row = {'E': self.values.expected_return, 'V': self.values.variance}
        if CriterionId.NEG_SHARPE in self.criteria:
            row['Sr'] = self.values.sharpe
        return row

    def membership_levels(self) -> Dict[str, float]:
        return dict(zip(self.problem.component_names, self.report.membership_levels.tolist()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'bounds': self.bounds.to_dict(),
            'problem': self.problem.to_dict(),
            'solution': {
                'weights': dict(zip(self.model.labels, self.x_star.tolist())),
                **self.solution_row(),
                'objective': self.report.objective,
                'membership_levels': self.membership_levels(),
            },
            'solve': self.report.to_dict(),
        }


def run_portfolio(model: MarketModel, criteria: Iterable[CriterionId],
                  mode: ScalarizationMode = ScalarizationMode.FUZZY,
                  goal_specs: Optional[Mapping[CriterionId, Tuple[ShapeLike, ShapeLike]]] = None,
                  cfg: Optional[SolverConfig] = None,
                  bounds: Optional[AspirationBounds] = None) -> PortfolioRun:
    """
    Bounds -> goals -> scalarize -> minimize Phi.

    The solve is non-strict: an unconverged report is returned so callers
    can write it before failing.
    """
    cfg = cfg or SolverConfig()
    criteria = tuple(sorted(set(criteria)))
    bounds = bounds or compute_bounds(model, criteria, cfg)
    problem = scalarize(model, bounds, goal_specs, criteria, mode)
    report = minimize(PhiObjective(problem), cfg, strict=False)
    logger.info(f"{ScalarizationMode(mode).value} solve over {[c.key for c in criteria]}: "
                f"Phi={report.objective:.8g}")
    return PortfolioRun(model=model, bounds=bounds, problem=problem, report=report)


def oracle_cross_check(run: PortfolioRun, samples: int, grid: Optional[int] = None,
                       seed: int = DEFAULT_SEED, cap: int = DEFAULT_POINT_CAP,
                       explicit_grid: bool = False) -> Dict[str, Any]:
    """
    Compare the solver's Phi with brute-force minima and check weak Pareto optimality.

    The solver must never lose to a cloud by more than 1e-9 (hard). The
    reverse gap is reported against 1e-3; it only closes on dense clouds.
    A default grid too large for the cap is skipped; an explicit one raises.
    """
    objective = PhiObjective(run.problem)
    n = run.model.n_assets
    clouds = [sample(SamplingScheme.dirichlet(samples, seed), n, cap)]
    if grid is not None:
        if grid_size(grid, n) > cap and not explicit_grid:
            logger.warning(f"Skipping grid m={grid}: {grid_size(grid, n)} points exceed the cap")
        else:
            clouds.append(sample(SamplingScheme.grid(grid), n, cap))

    solver_value = run.report.objective
    fixtures = [oracle_min(objective, cloud) for cloud in clouds]
    best = min(f.value for f in fixtures)
    pareto = all(check_weak_pareto(run.model, run.x_star, cloud, PARETO_EPS, run.criteria)
                 for cloud in clouds)
    summary = {
        'solver_value': solver_value,
        'oracle_min': best,
        'gap': best - solver_value,
        'never_beaten': bool(solver_value <= best + NEVER_BEATEN_TOL),
        'within_resolution': bool(best - solver_value <= RESOLUTION_TOL),
        'weak_pareto': bool(pareto),
        'clouds': [f.to_dict() for f in fixtures],
    }
    logger.info(f"Oracle cross-check: solver={solver_value:.10g}, oracle={best:.10g}, "
                f"never_beaten={summary['never_beaten']}, weak_pareto={pareto}")
    return summary
