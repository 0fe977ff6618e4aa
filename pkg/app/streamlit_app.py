#!/usr/bin/env python3
"""
Portfolio selection viewer
Streamlit application running the solve pipeline on the bundled instance
or an uploaded returns CSV. Shapes are picked once per run; there is no
interactive elicitation.
"""

import logging
import os
import sys
import tempfile
from pathlib import Path

import streamlit as st

# Add parent directory to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from components.charts import goal_chart, levels_chart, risk_return_chart, weights_chart
from config.run_config import ProblemKind
from config.settings import settings
from if_portfolio.core.exceptions import PortfolioError
from if_portfolio.core.market_model import MarketModel, estimate_model, load_model, load_returns
from if_portfolio.core.objectives import CriterionId, evaluate_batch
from if_portfolio.fuzzy.scalarization import ScalarizationMode
from if_portfolio.optimization.solver import SolverConfig
from if_portfolio.pipeline import PortfolioRun, run_portfolio
from if_portfolio.validation.oracle import SamplingScheme, sample
from utils.helpers import format_number, setup_logging, weights_frame

logger = logging.getLogger(__name__)

# Page Configuration
st.set_page_config(
    page_title="Fuzzy Portfolio Selection",
    layout="wide",
    initial_sidebar_state="expanded",
)

PREVIEW_SAMPLES = 5000


@st.cache_data(show_spinner=False)
def load_bundled_model() -> MarketModel:
    return load_model(Path(settings.output_config['paper_instance_path']))


def model_from_upload(data: bytes, rf: float) -> MarketModel:
    with tempfile.NamedTemporaryFile(suffix='.csv', delete=False) as handle:
        handle.write(data)
    try:
        return estimate_model(load_returns(handle.name), rf)
    finally:
        os.unlink(handle.name)


@st.cache_data(show_spinner="Solving...")
def solve(_model: MarketModel, model_key: str, problem: str, mode: str,
          mu: str, nu: str, n_starts: int) -> PortfolioRun:
    criteria = ProblemKind(problem).criteria
    specs = {c: (mu, nu) for c in criteria}
    cfg = SolverConfig(**{**settings.solver_defaults, 'n_starts': n_starts})
    return run_portfolio(_model, criteria, ScalarizationMode(mode), specs, cfg)


def render_sidebar():
    st.sidebar.markdown("### Data")
    source = st.sidebar.radio("Market model", ["Bundled seven-stock instance", "Upload returns CSV"])
    upload, rf = None, None
    if source.startswith("Upload"):
        upload = st.sidebar.file_uploader("Returns CSV (header row = asset labels)", type=['csv'])
        rf = st.sidebar.number_input("Risk-free rate", value=0.005, format="%.5f")

    st.sidebar.markdown("### Problem")
    problem = st.sidebar.selectbox("Criteria", ['mvs', 'mv'], format_func=str.upper)
    mode = st.sidebar.selectbox("Mode", ['fuzzy', 'crisp'])
    mu = st.sidebar.text_input("Membership shape", value='linear', help="linear | exp:<k> | table:<s:v,...>")
    nu = st.sidebar.text_input("Non-membership shape", value='linear')
    n_starts = st.sidebar.slider("Multi-start points", 1, 32, settings.solver_defaults['n_starts'])
    return upload, rf, problem, mode, mu, nu, n_starts


# Main Application
def main():
    """Main Streamlit application."""
    setup_logging(settings.output_config['log_level'])
    st.title("Intuitionistic fuzzy portfolio selection")

    upload, rf, problem, mode, mu, nu, n_starts = render_sidebar()
    try:
        if upload is not None:
            model = model_from_upload(upload.getvalue(), rf)
            model_key = f"upload:{upload.name}:{rf}"
        else:
            model = load_bundled_model()
            model_key = 'bundled'
        assets = st.sidebar.multiselect("Assets", list(model.labels), default=list(model.labels))
        if len(assets) < 2:
            st.warning("Select at least two assets.")
            st.stop()
        if len(assets) < model.n_assets:
            model = model.subset(assets)
            model_key = f"{model_key}:{','.join(assets)}"
        run = solve(model, model_key, problem, mode, mu, nu, n_starts)
    except PortfolioError as e:
        st.error(f"{e.__class__.__name__}: {e}")
        st.stop()

    row = run.solution_row()
    columns = st.columns(len(row) + 1)
    for column, (key, value) in zip(columns, row.items()):
        column.metric(f"{key}(x)", format_number(value, 4))
    columns[-1].metric("Objective", format_number(run.report.objective, 4),
                       help="maximum component level")

    left, right = st.columns(2)
    with left:
        st.plotly_chart(weights_chart(model.labels, run.x_star.tolist()), use_container_width=True)
        st.dataframe(weights_frame(model.labels, run.x_star.tolist(), min_weight=1e-6))
    with right:
        levels = run.membership_levels()
        st.plotly_chart(levels_chart(list(levels), list(levels.values()), run.report.objective),
                        use_container_width=True)

    st.markdown("### Goals")
    goal_columns = st.columns(len(run.problem.goals))
    for column, goal in zip(goal_columns, run.problem.goals):
        with column:
            st.plotly_chart(goal_chart(goal, marker=run.values[goal.criterion]), use_container_width=True)

    cloud = sample(SamplingScheme.dirichlet(PREVIEW_SAMPLES, settings.oracle_defaults['seed']), model.n_assets)
    returns = -evaluate_batch(model, cloud.points, CriterionId.NEG_EXPECTED_RETURN)
    variances = evaluate_batch(model, cloud.points, CriterionId.VARIANCE)
    st.plotly_chart(risk_return_chart(returns, variances, (row['E'], row['V'])), use_container_width=True)


if __name__ == "__main__":
    main()
