"""
Reproduction of the published experiment.
"""

__all__ = ['ReproducePaperCommand', 'reproduce_paper']

from .paper_reproduction import ReproducePaperCommand, reproduce_paper
