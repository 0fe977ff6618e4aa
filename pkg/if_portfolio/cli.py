#!/usr/bin/env python3
"""
Command-line front end for intuitionistic fuzzy portfolio selection.

Commands:
- bounds           aspiration bounds (y1, y0) per criterion
- solve            crisp or fuzzy solve with an optional oracle cross-check
- oracle           brute-force minimum of one objective over a sample cloud
- reproduce-paper  the published seven-stock experiment with graded checks

Exit codes: 0 success, 1 failed reproduction check, 2 config, 3 model,
4 degenerate criterion, 5 solver, 6 resource limit.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from config.run_config import LOG_LEVELS, RunConfig
from config.settings import settings
from utils.helpers import bounds_frame, levels_frame, setup_logging, weights_frame

from .benchmarking.paper_reproduction import reproduce_paper
from .core.base_command import BANNER, BaseCommand, format_table
from .core.exceptions import PortfolioError, SolverFailure
from .core.objectives import CriterionId
from .fuzzy.scalarization import PhiObjective, scalarize
from .optimization.bounds import compute_bounds
from .optimization.solver import CriterionObjective
from .pipeline import oracle_cross_check, run_portfolio
from .validation.oracle import SamplingScheme, oracle_min, sample

logger = logging.getLogger(__name__)


class BoundsCommand(BaseCommand):
    """Print and report the aspiration bounds of the configured problem."""

    def __init__(self, config: RunConfig, output_dir: str = "output"):
        super().__init__(output_dir)
        self.config = config

    def run(self) -> Dict[str, Any]:
        model = self.config.load_market_model()
        bounds = compute_bounds(model, self.config.criteria, self.config.solver_config())
        return {
            'config': self.config.to_dict(),
            'labels': list(model.labels),
            'bounds': bounds.to_dict(),
        }

    def render(self, report: Dict[str, Any]) -> str:
        return format_table("Aspiration bounds", bounds_frame(report['bounds'], report['labels']),
                            float_format='{:.8g}')


class SolveCommand(BaseCommand):
    """Full pipeline: bounds, goals, scalarization, multi-start solve."""

    def __init__(self, config: RunConfig, output_dir: str = "output"):
        super().__init__(output_dir)
        self.config = config
        self.converged = True

    def run(self) -> Dict[str, Any]:
        model = self.config.load_market_model()
        run = run_portfolio(model, self.config.criteria, self.config.mode,
                            self.config.goal_specs, self.config.solver_config())
        self.converged = run.report.converged
        report = {'config': self.config.to_dict(), 'labels': list(model.labels), **run.to_dict()}
        if self.config.oracle_check:
            oracle = settings.oracle_defaults
            report['oracle_check'] = oracle_cross_check(
                run,
                samples=self.config.samples or oracle['samples'],
                grid=self.config.grid or oracle['grid'],
                seed=oracle['seed'],
                cap=oracle['point_cap'],
                explicit_grid=self.config.grid is not None,
            )
        return report

    def render(self, report: Dict[str, Any]) -> str:
        solution = report['solution']
        row = {k: solution[k] for k in ('E', 'V', 'Sr') if k in solution}
        text = (format_table("Portfolio weights",
                             weights_frame(report['labels'], list(solution['weights'].values())))
                + format_table("Criterion values", pd.DataFrame([row], index=['x*']))
                + format_table(f"Components (objective {solution['objective']:.10g})",
                               levels_frame(list(solution['membership_levels']),
                                            list(solution['membership_levels'].values()))))
        if 'oracle_check' in report:
            check = {k: v for k, v in report['oracle_check'].items() if k != 'clouds'}
            text += format_table("Oracle cross-check", pd.DataFrame([check]).T.rename(columns={0: 'value'}))
        return text


class OracleCommand(BaseCommand):
    """Brute-force minimum of Phi or of a single criterion."""

    def __init__(self, config: RunConfig, output_dir: str = "output"):
        super().__init__(output_dir)
        self.config = config

    def scheme(self) -> SamplingScheme:
        if self.config.grid is not None:
            return SamplingScheme.grid(self.config.grid)
        oracle = settings.oracle_defaults
        seed = self.config.seed if self.config.seed is not None else oracle['seed']
        return SamplingScheme.dirichlet(self.config.samples or oracle['samples'], seed)

    def objective(self, model):
        if self.config.objective != 'phi':
            return CriterionObjective(model, CriterionId.from_key(self.config.objective))
        cfg = self.config.solver_config()
        bounds = compute_bounds(model, self.config.criteria, cfg)
        problem = scalarize(model, bounds, self.config.goal_specs, self.config.criteria, self.config.mode)
        return PhiObjective(problem)

    def run(self) -> Dict[str, Any]:
        model = self.config.load_market_model()
        objective = self.objective(model)
        cloud = sample(self.scheme(), model.n_assets, settings.oracle_defaults['point_cap'])
        return oracle_min(objective, cloud).to_dict()

    def render(self, report: Dict[str, Any]) -> str:
        rows = {k: v for k, v in report.items() if k != 'best_point'}
        return (format_table("Oracle minimum", pd.DataFrame([rows]).T.rename(columns={0: 'value'}))
                + f"best point: {report['best_point']}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='if_portfolio',
        description='Intuitionistic fuzzy multicriteria portfolio selection',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Aspiration bounds of the bundled seven-stock instance
  python -m if_portfolio bounds --model data/paper_instance.txt

  # Fuzzy MVS solve with exponential memberships and an oracle cross-check
  python -m if_portfolio solve --problem mvs --mode fuzzy --mu exp:2 --nu linear --oracle-check

  # Grid oracle fixture for the variance criterion
  python -m if_portfolio oracle --objective variance --grid 12 --out variance_grid.json

  # Reproduce the published experiment
  python -m if_portfolio reproduce-paper --out reproduction.json
        """
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='key = value file with the same keys as the flags')
    common.add_argument('--model', help='model file ([assets], [mean_returns], [covariance], [risk_free_rate])')
    common.add_argument('--returns', help='return-series CSV (header row = asset labels)')
    common.add_argument('--rf', help='risk-free rate for --returns')
    common.add_argument('--problem', choices=['mv', 'mvs'], help='two (mv) or three (mvs) criteria')
    common.add_argument('--mode', choices=['crisp', 'fuzzy'], help='crisp Chebyshev baseline or fuzzy goals')
    common.add_argument('--mu', help='membership shape: linear | exp:<k> | table:<s:v,...>')
    common.add_argument('--nu', help='non-membership shape: linear | exp:<k> | table:<s:v,...>')
    common.add_argument('--seed', help='solver seed (Dirichlet seed for the oracle command)')
    common.add_argument('--starts', help='number of multi-start points')
    common.add_argument('--max-iters', help='iteration budget per start')
    common.add_argument('--out', help='write the JSON report to this path')
    common.add_argument('--oracle-check', action='store_const', const=True, default=None,
                        help='cross-check the solution against brute-force clouds')
    common.add_argument('--grid', help='grid resolution m of the oracle cloud')
    common.add_argument('--samples', help='Dirichlet sample count of the oracle cloud')
    common.add_argument('--objective', help="oracle objective: phi or a criterion key")
    common.add_argument('--log-level', type=str.upper, choices=LOG_LEVELS, help='logging level')

    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('bounds', parents=[common], help='aspiration bounds per criterion')
    commands.add_parser('solve', parents=[common], help='solve the crisp or fuzzy problem')
    commands.add_parser('oracle', parents=[common], help='brute-force oracle fixture')
    commands.add_parser('reproduce-paper', parents=[common], help='reproduce the published experiment')
    return parser


def flags_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    flags = {k: v for k, v in vars(args).items() if k not in ('command', 'config')}
    return {k: v for k, v in flags.items() if v is not None}


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution function; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    output = settings.output_config
    setup_logging(args.log_level or output['log_level'])

    try:
        config = RunConfig.from_sources(args.config, flags_from_args(args))
        setup_logging(config.log_level)
        output_dir = output['output_dir']
        out = Path(config.out) if config.out is not None else None

        if args.command == 'bounds':
            BoundsCommand(config, output_dir).execute(out)
        elif args.command == 'solve':
            command = SolveCommand(config, output_dir)
            command.execute(out)
            if not command.converged:
                raise SolverFailure("no start converged; the report above is the best unconverged iterate")
        elif args.command == 'oracle':
            OracleCommand(config, output_dir).execute(out)
        elif args.command == 'reproduce-paper':
            reproduce_paper(out, instance=config.model, cfg=config.solver_config(),
                            samples=config.samples, grid=config.grid, seed=config.seed,
                            output_dir=output_dir)
        return 0

    except PortfolioError as e:
        logger.error(f"{args.command} failed ({e.__class__.__name__}): {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
