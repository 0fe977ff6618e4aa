"""Shared fixtures: the bundled seven-stock instance and small hand-checkable markets."""

from pathlib import Path

import numpy as np
import pytest

from if_portfolio.core.market_model import MarketModel, load_model
from if_portfolio.core.objectives import CriterionId, PortfolioWeights
from if_portfolio.optimization.bounds import AspirationBounds, CriterionBounds
from if_portfolio.optimization.solver import SolverConfig

REPO_ROOT = Path(__file__).resolve().parent.parent
PAPER_INSTANCE = REPO_ROOT / 'data' / 'paper_instance.txt'
SAMPLE_RETURNS = REPO_ROOT / 'data' / 'sample_returns.csv'

MV = (CriterionId.NEG_EXPECTED_RETURN, CriterionId.VARIANCE)


@pytest.fixture(scope='session')
def paper_model() -> MarketModel:
    return load_model(PAPER_INSTANCE)


@pytest.fixture
def identity_model() -> MarketModel:
    """Two assets, Q = I: E* in [-0.02, -0.01], V in [0.5, 1]."""
    return MarketModel(labels=('A', 'B'), mean_returns=[0.02, 0.01],
                       covariance=np.eye(2), risk_free_rate=0.0)


@pytest.fixture
def dominated_model() -> MarketModel:
    """Asset A beats asset B on return, variance and Sharpe ratio."""
    return MarketModel(labels=('A', 'B'), mean_returns=[0.03, 0.01],
                       covariance=np.diag([0.01, 0.02]), risk_free_rate=0.005)


@pytest.fixture
def singular_model() -> MarketModel:
    """Perfectly anti-correlated pair: the uniform portfolio has zero variance."""
    return MarketModel(labels=('A', 'B'), mean_returns=[0.02, 0.01],
                       covariance=[[1.0, -1.0], [-1.0, 1.0]], risk_free_rate=0.0)


@pytest.fixture
def identity_bounds() -> AspirationBounds:
    """Exact MV bounds of identity_model."""
    return AspirationBounds(entries=(
        CriterionBounds(CriterionId.NEG_EXPECTED_RETURN, -0.02, -0.01, PortfolioWeights.vertex(2, 0), 1),
        CriterionBounds(CriterionId.VARIANCE, 0.5, 1.0, PortfolioWeights.uniform(2), 0),
    ))


@pytest.fixture
def fast_cfg() -> SolverConfig:
    return SolverConfig(max_iters=20000, n_starts=4)


def write_model_file(path: Path, labels, mean_returns, covariance, rate) -> Path:
    lines = ['[assets]', ', '.join(labels), '[mean_returns]', ', '.join(map(str, mean_returns)),
             '[covariance]']
    lines += [', '.join(map(str, row)) for row in covariance]
    lines += ['[risk_free_rate]', str(rate)]
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path
