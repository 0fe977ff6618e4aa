"""
Logging setup and table helpers shared by the CLI and the dashboard.
"""

from .helpers import bounds_frame, format_number, levels_frame, setup_logging, weights_frame

__all__ = ['bounds_frame', 'format_number', 'levels_frame', 'setup_logging', 'weights_frame']
