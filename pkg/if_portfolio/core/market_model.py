#!/usr/bin/env python3
"""
Market model construction and validation.

A market model bundles the per-period expected returns L, the return
covariance matrix Q and the risk-free rate p_rf for a fixed list of assets.
Models are built either from precomputed tables (the model file format) or
estimated from a history of realized returns (a returns CSV).

Model file format (UTF-8, '#' starts a comment)::

    [assets]
    StC1, StC2, StC3
    [mean_returns]
    0.0282, 0.0462, 0.0188
    [covariance]
    0.0119, 0.0079, 0.0017
    0.0079, 0.0157, 0.0016
    0.0017, 0.0016, 0.0056
    [risk_free_rate]
    0.005

Requirements:
- numpy
- pandas
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .exceptions import (
    DegenerateAsset,
    DimensionMismatch,
    EmptySeries,
    InvariantViolation,
    NonFiniteInput,
    ParseError,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
PSD_REL_TOL = 1e-10
MIN_ASSET_VARIANCE = 1e-16

MODEL_SECTIONS = ('assets', 'mean_returns', 'covariance', 'risk_free_rate')


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    try:
        array = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise ParseError(f"{name} is not numeric: {e}") from e
    if array.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise NonFiniteInput(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MarketModel:
    """Immutable market model (L, Q, p_rf) over a labelled asset universe."""

    labels: Tuple[str, ...]
    mean_returns: np.ndarray
    covariance: np.ndarray
    risk_free_rate: float
    psd_repaired: bool = field(default=False)

    def __post_init__(self):
        object.__setattr__(self, 'labels', tuple(str(label) for label in self.labels))
        object.__setattr__(self, 'mean_returns', _frozen_array(self.mean_returns, 1, 'mean_returns'))
        object.__setattr__(self, 'covariance', _frozen_array(self.covariance, 2, 'covariance'))
        rate = float(self.risk_free_rate)
        if not np.isfinite(rate):
            raise NonFiniteInput("risk_free_rate must be finite")
        object.__setattr__(self, 'risk_free_rate', rate)
        validate_model(self)

    @property
    def n_assets(self) -> int:
        return len(self.labels)

    def permuted(self, order: Sequence[int]) -> 'MarketModel':
        """Return the same market with assets reordered."""
        order = np.asarray(order, dtype=int)
        if sorted(order.tolist()) != list(range(self.n_assets)):
            raise DimensionMismatch(f"{order.tolist()} is not a permutation of {self.n_assets} assets")
        return MarketModel(
            labels=tuple(self.labels[i] for i in order),
            mean_returns=self.mean_returns[order],
            covariance=self.covariance[np.ix_(order, order)],
            risk_free_rate=self.risk_free_rate,
            psd_repaired=self.psd_repaired,
        )

    def subset(self, labels: Sequence[str]) -> 'MarketModel':
        """Restrict the model to the named assets, in the given order."""
        index = {label: i for i, label in enumerate(self.labels)}
        missing = [label for label in labels if label not in index]
        if missing:
            raise DimensionMismatch(f"Unknown assets: {missing}")
        order = [index[label] for label in labels]
        return MarketModel(
            labels=tuple(labels),
            mean_returns=self.mean_returns[order],
            covariance=self.covariance[np.ix_(order, order)],
            risk_free_rate=self.risk_free_rate,
        )

    def to_text(self) -> str:
        """Render the model in the model file format."""
        lines = ['[assets]', ', '.join(self.labels), '[mean_returns]',
                 ', '.join(repr(float(v)) for v in self.mean_returns), '[covariance]']
        lines.extend(', '.join(repr(float(v)) for v in row) for row in self.covariance)
        lines.extend(['[risk_free_rate]', repr(self.risk_free_rate)])
        return '\n'.join(lines) + '\n'

    def to_dict(self) -> Dict[str, object]:
        return {
            'labels': list(self.labels),
            'mean_returns': self.mean_returns.tolist(),
            'covariance': self.covariance.tolist(),
            'risk_free_rate': self.risk_free_rate,
            'psd_repaired': self.psd_repaired,
        }


def validate_model(model: MarketModel) -> None:
    """
    Check every MarketModel invariant.

    Raises:
        DimensionMismatch: shapes disagree with the label count
        InvariantViolation: symmetry, PSD or size invariant broken
        DegenerateAsset: some Q[k][k] is not positive
    """
    n = len(model.labels)
    if n < 2:
        raise InvariantViolation('size', f"at least 2 assets are required, got {n}")
    if len(set(model.labels)) != n:
        raise InvariantViolation('labels', "asset labels must be unique")
    if model.mean_returns.shape != (n,):
        raise DimensionMismatch(f"mean_returns has length {model.mean_returns.shape[0]}, expected {n}")
    if model.covariance.shape != (n, n):
        raise DimensionMismatch(f"covariance has shape {model.covariance.shape}, expected ({n}, {n})")

    Q = model.covariance
    asymmetry = float(np.max(np.abs(Q - Q.T)))
    if asymmetry > SYMMETRY_TOL:
        i, k = np.unravel_index(np.argmax(np.abs(Q - Q.T)), Q.shape)
        raise InvariantViolation(
            'symmetry', f"Q[{i}][{k}]={Q[i, k]!r} differs from Q[{k}][{i}]={Q[k, i]!r}")

    diagonal = np.diag(Q)
    degenerate = [model.labels[k] for k in range(n) if diagonal[k] <= MIN_ASSET_VARIANCE]
    if degenerate:
        raise DegenerateAsset(f"Assets with non-positive variance: {degenerate}", degenerate)

    eigenvalues = np.linalg.eigvalsh((Q + Q.T) / 2.0)
    if eigenvalues[0] < -PSD_REL_TOL * eigenvalues[-1]:
        raise InvariantViolation(
            'psd', f"smallest eigenvalue {eigenvalues[0]:.3e} below tolerance "
                   f"(largest {eigenvalues[-1]:.3e})")


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """T x n matrix of realized per-period returns."""

    labels: Tuple[str, ...]
    observations: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'labels', tuple(str(label) for label in self.labels))
        rows = self.observations
        if isinstance(rows, np.ndarray):
            widths = {rows.shape[1]} if rows.ndim == 2 else {-1}
        else:
            widths = {len(row) for row in rows}
        if len(widths) > 1 or widths == {-1}:
            raise DimensionMismatch(f"observation rows have inconsistent lengths: {sorted(widths)}")
        array = _frozen_array(rows, 2, 'observations') if len(rows) else np.empty((0, len(self.labels)))
        if array.shape[1] != len(self.labels):
            raise DimensionMismatch(
                f"{array.shape[1]} return columns but {len(self.labels)} labels")
        object.__setattr__(self, 'observations', array)


def estimate_model(series: ReturnSeries, risk_free_rate: float) -> MarketModel:
    """
    Estimate (L, Q) from a return history.

    Args:
        series: Realized returns, T >= 2 rows
        risk_free_rate: Per-period risk-free return

    Returns:
        MarketModel with sample means and the T-1 sample covariance. A
        covariance that is not PSD after symmetrization is repaired by
        clipping eigenvalues at zero and flagged with psd_repaired.
    """
    if not np.isfinite(risk_free_rate):
        raise NonFiniteInput("risk_free_rate must be finite")
    observations = series.observations
    if observations.shape[0] < 2:
        raise EmptySeries(f"need at least 2 observations, got {observations.shape[0]}")

    mean_returns = observations.mean(axis=0)
    covariance = np.cov(observations, rowvar=False, ddof=1)
    covariance = (covariance + covariance.T) / 2.0

    repaired = False
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    if eigenvalues[0] < 0.0:
        logger.warning(f"Sample covariance has eigenvalue {eigenvalues[0]:.3e} < 0, clipping at 0")
        clipped = np.clip(eigenvalues, 0.0, None)
        covariance = (eigenvectors * clipped) @ eigenvectors.T
        covariance = (covariance + covariance.T) / 2.0
        repaired = True

    model = MarketModel(
        labels=series.labels,
        mean_returns=mean_returns,
        covariance=covariance,
        risk_free_rate=risk_free_rate,
        psd_repaired=repaired,
    )
    logger.info(f"Estimated model for {model.n_assets} assets from {observations.shape[0]} periods")
    return model


def _split_decimals(line: str, section: str, line_no: int) -> List[float]:
    values = []
    for token in line.split(','):
        token = token.strip()
        if not token:
            raise ParseError(f"line {line_no}: empty value in [{section}]")
        try:
            values.append(float(token))
        except ValueError as e:
            raise ParseError(f"line {line_no}: '{token}' is not a decimal in [{section}]") from e
    return values


def parse_model_text(text: str) -> MarketModel:
    """Parse the model file format (see module docstring)."""
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if line.startswith('[') and line.endswith(']'):
            current = line[1:-1].strip().lower()
            if current not in MODEL_SECTIONS:
                raise ParseError(f"line {line_no}: unknown section [{current}]")
            if current in sections:
                raise ParseError(f"line {line_no}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise ParseError(f"line {line_no}: content before the first section header")
        sections[current].append((line_no, line))

    missing = [name for name in MODEL_SECTIONS if not sections.get(name)]
    if missing:
        raise ParseError(f"missing or empty sections: {missing}")

    labels = [token.strip() for _, line in sections['assets'] for token in line.split(',')]
    if any(not label for label in labels):
        raise ParseError("empty asset label in [assets]")

    mean_returns = [v for line_no, line in sections['mean_returns']
                    for v in _split_decimals(line, 'mean_returns', line_no)]
    covariance = [_split_decimals(line, 'covariance', line_no)
                  for line_no, line in sections['covariance']]
    if any(len(row) != len(labels) for row in covariance) or len(covariance) != len(labels):
        raise DimensionMismatch(
            f"covariance must be {len(labels)}x{len(labels)}, got rows of lengths "
            f"{[len(row) for row in covariance]}")

    rate_lines = sections['risk_free_rate']
    rate_values = _split_decimals(rate_lines[0][1], 'risk_free_rate', rate_lines[0][0])
    if len(rate_lines) != 1 or len(rate_values) != 1:
        raise ParseError("[risk_free_rate] must hold exactly one decimal")

    return MarketModel(
        labels=tuple(labels),
        mean_returns=mean_returns,
        covariance=covariance,
        risk_free_rate=rate_values[0],
    )


def load_model(source: Union[str, Path]) -> MarketModel:
    """
    Load a model from a path or from model-file text.

    Args:
        source: Path to a model file, or the file contents (any string
                containing a newline is treated as contents)

    Returns:
        Validated MarketModel
    """
    if isinstance(source, Path) or ('\n' not in str(source)):
        path = Path(source)
        if not path.is_file():
            raise ParseError(f"Model file not found: {path}")
        text = path.read_text(encoding='utf-8')
        logger.debug(f"Loading model file: {path}")
    else:
        text = str(source)
    model = parse_model_text(text)
    logger.info(f"Loaded model with {model.n_assets} assets, p_rf={model.risk_free_rate}")
    return model


def save_model(model: MarketModel, path: Union[str, Path]) -> Path:
    """Write the model in the model file format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.to_text(), encoding='utf-8')
    logger.info(f"Model saved to: {path}")
    return path


def load_returns(path: Union[str, Path]) -> ReturnSeries:
    """
    Read a return-series CSV (header row = asset labels).

    Raises:
        ParseError: file missing or a cell is not a decimal
        NonFiniteInput: NaN/inf cells, including empty cells
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"Returns file not found: {path}")
    try:
        frame = pd.read_csv(path, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ParseError(f"Could not parse returns CSV {path}: {e}") from e

    try:
        numeric = frame.apply(pd.to_numeric, errors='raise')
    except (ValueError, TypeError) as e:
        raise ParseError(f"Non-decimal value in returns CSV {path}: {e}") from e
    if not np.all(np.isfinite(numeric.to_numpy(dtype=float))):
        raise NonFiniteInput(f"Returns CSV {path} contains empty or non-finite cells")

    logger.info(f"Loaded {len(numeric)} return periods for {numeric.shape[1]} assets from {path}")
    return ReturnSeries(labels=tuple(frame.columns), observations=numeric.to_numpy(dtype=float))
