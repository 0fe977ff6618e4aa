"""
Membership shapes, intuitionistic fuzzy goals and the min-max scalarization.
"""

from .scalarization import IFGoal, PhiObjective, ScalarizedProblem, make_goal, scalarize
from .shapes import MembershipShape

__all__ = ['IFGoal', 'PhiObjective', 'ScalarizedProblem', 'make_goal', 'scalarize', 'MembershipShape']
