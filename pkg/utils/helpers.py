#!/usr/bin/env python3
"""
Common Utility Functions for the CLI and dashboard

Provides shared helpers for logging setup, number formatting and the
tabular views of weights, bounds and criterion values.
"""

import logging
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'


def setup_logging(level: str = 'INFO') -> None:
    """Configure root logging once for an entry point."""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        format=LOG_FORMAT, datefmt=LOG_DATEFMT, force=True)


def format_number(num: Optional[float], precision: int = 4) -> str:
    """Format number with the given precision; None renders as a dash."""
    if num is None:
        return "-"
    try:
        if isinstance(num, (int, np.integer)):
            return f"{num:,}"
        if not np.isfinite(num):
            return str(num)
        return f"{num:.{precision}f}"
    except (TypeError, ValueError):
        return str(num)


def weights_frame(labels: Sequence[str], weights: Sequence[float],
                  min_weight: float = 0.0) -> pd.DataFrame:
    """Weights table indexed by asset label, dropping positions below min_weight."""
    frame = pd.DataFrame({'weight': np.asarray(weights, dtype=float)}, index=list(labels))
    frame.index.name = 'asset'
    return frame[frame['weight'] >= min_weight]


def levels_frame(names: Sequence[str], levels: Sequence[float]) -> pd.DataFrame:
    frame = pd.DataFrame({'level': np.asarray(levels, dtype=float)}, index=list(names))
    frame.index.name = 'component'
    return frame


def bounds_frame(bounds: Mapping[str, Mapping[str, object]],
                 labels: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """One row per criterion from AspirationBounds.to_dict()."""
    rows = []
    for key, entry in bounds.items():
        vertex = entry.get('argmax_vertex')
        if vertex is not None and labels is not None:
            vertex = labels[vertex]
        rows.append({'criterion': key, 'y1': entry['y1'], 'y0': entry['y0'], 'y0 vertex': vertex})
    return pd.DataFrame(rows).set_index('criterion') if rows else pd.DataFrame()
