"""
Brute-force sampling oracle.
"""

__all__ = ['SamplingScheme', 'SampleCloud', 'sample', 'oracle_min', 'check_weak_pareto']

from .oracle import SampleCloud, SamplingScheme, check_weak_pareto, oracle_min, sample
