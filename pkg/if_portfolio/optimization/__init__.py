"""
Simplex solver and aspiration bounds.
"""

from .bounds import AspirationBounds, compute_bounds
from .solver import SolverConfig, SolveReport, minimize, project_simplex

__all__ = ['AspirationBounds', 'compute_bounds', 'SolverConfig', 'SolveReport', 'minimize', 'project_simplex']
