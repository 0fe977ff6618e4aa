#!/usr/bin/env python3
"""
Plotly figures for the dashboard.

Builders return figures and never touch Streamlit, so they can be used
from notebooks and tests as well.
"""

from typing import Optional, Sequence

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from if_portfolio.fuzzy.scalarization import IFGoal

TEMPLATE = 'plotly_white'


def _style(fig: go.Figure, title: str, height: int = 400) -> go.Figure:
    fig.update_layout(
        title=title,
        template=TEMPLATE,
        height=height,
        font=dict(size=12),
        title_font=dict(size=14, color='#333'),
    )
    return fig


def weights_chart(labels: Sequence[str], weights: Sequence[float],
                  reference: Optional[Sequence[float]] = None,
                  reference_name: str = 'published') -> go.Figure:
    """Grouped bars of portfolio weights, optionally beside a reference portfolio."""
    frame = pd.DataFrame({'asset': list(labels), 'weight': list(weights), 'portfolio': 'solution'})
    if reference is not None:
        frame = pd.concat([frame, pd.DataFrame({
            'asset': list(labels), 'weight': list(reference), 'portfolio': reference_name})])
    fig = px.bar(frame, x='asset', y='weight', color='portfolio', barmode='group')
    return _style(fig, 'Portfolio weights')


def levels_chart(names: Sequence[str], levels: Sequence[float], objective: float) -> go.Figure:
    """Component levels with the objective (their maximum) as a reference line."""
    fig = px.bar(pd.DataFrame({'component': list(names), 'level': list(levels)}),
                 x='component', y='level')
    fig.add_hline(y=objective, line_dash='dash', annotation_text=f"max = {objective:.4f}")
    fig.update_yaxes(range=[0, 1])
    return _style(fig, 'Component levels at the solution')


def goal_chart(goal: IFGoal, marker: Optional[float] = None, points: int = 200) -> go.Figure:
    """mu, nu and the hesitation margin 1 - mu - nu over [y1, y0]."""
    t = np.linspace(goal.y1, goal.y0, points)
    mu, nu = goal.mu_value(t), goal.nu_value(t)
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=t, y=mu, name=f"mu ({goal.mu.spec})"))
    fig.add_trace(go.Scatter(x=t, y=nu, name=f"nu ({goal.nu.spec})"))
    fig.add_trace(go.Scatter(x=t, y=1.0 - mu - nu, name='hesitation', line=dict(dash='dot')))
    if marker is not None:
        fig.add_vline(x=marker, line_dash='dash', annotation_text='solution')
    fig.update_yaxes(range=[-0.02, 1.02])
    return _style(fig, goal.criterion.key, height=320)


def risk_return_chart(expected_returns: np.ndarray, variances: np.ndarray,
                      solution: Optional[tuple] = None) -> go.Figure:
    """Sampled portfolios in the (V, E) plane with the solution highlighted."""
    fig = go.Figure()
    fig.add_trace(go.Scattergl(x=variances, y=expected_returns, mode='markers', name='samples',
                               marker=dict(size=3, opacity=0.35)))
    if solution is not None:
        fig.add_trace(go.Scatter(x=[solution[1]], y=[solution[0]], mode='markers', name='solution',
                                 marker=dict(size=12, symbol='star')))
    fig.update_xaxes(title='V(x)')
    fig.update_yaxes(title='E(x)')
    return _style(fig, 'Risk and return of sampled portfolios', height=450)
