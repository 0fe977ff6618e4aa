#!/usr/bin/env python3
"""
Run configuration for the command-line front end.

A RunConfig is built from parsed flags, a `key = value` config file, or
both (flags win). Keys are the long flag names with dashes or
underscores. Per-criterion shapes use `mu_<criterion>` / `nu_<criterion>`
and override the global `mu` / `nu`.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values

from if_portfolio.core.exceptions import ConfigError
from if_portfolio.core.market_model import MarketModel, estimate_model, load_model, load_returns
from if_portfolio.core.objectives import ALL_CRITERIA, CriterionId
from if_portfolio.fuzzy.scalarization import ScalarizationMode
from if_portfolio.optimization.solver import SolverConfig

from .settings import settings

logger = logging.getLogger(__name__)

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


class ProblemKind(str, Enum):
    MV = 'mv'
    MVS = 'mvs'

    @property
    def criteria(self) -> Tuple[CriterionId, ...]:
        if self == ProblemKind.MV:
            return (CriterionId.NEG_EXPECTED_RETURN, CriterionId.VARIANCE)
        return ALL_CRITERIA


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off', ''):
        return False
    raise ValueError(f"not a boolean: {value!r}")


_CONVERTERS = {
    'model': Path,
    'returns': Path,
    'rf': float,
    'problem': lambda v: ProblemKind(str(v).strip().lower()),
    'mode': lambda v: ScalarizationMode(str(v).strip().lower()),
    'mu': str,
    'nu': str,
    'seed': int,
    'starts': int,
    'max_iters': int,
    'out': Path,
    'oracle_check': _as_bool,
    'grid': int,
    'samples': int,
    'log_level': lambda v: str(v).strip().upper(),
    'objective': lambda v: str(v).strip().lower(),
}
_SHAPE_KEYS = {f"{role}_{c.key}": (role, c) for role in ('mu', 'nu') for c in CriterionId}


@dataclass
class RunConfig:
    """Validated configuration of one CLI run."""

    model: Optional[Path] = None
    returns: Optional[Path] = None
    rf: Optional[float] = None
    problem: ProblemKind = ProblemKind.MVS
    mode: ScalarizationMode = ScalarizationMode.FUZZY
    mu: str = 'linear'
    nu: str = 'linear'
    criterion_shapes: Dict[CriterionId, Dict[str, str]] = field(default_factory=dict)
    seed: Optional[int] = None
    starts: Optional[int] = None
    max_iters: Optional[int] = None
    out: Optional[Path] = None
    oracle_check: bool = False
    grid: Optional[int] = None
    samples: Optional[int] = None
    log_level: str = field(default_factory=lambda: settings.get('log_level'))
    objective: str = 'phi'

    def __post_init__(self):
        """Validate configuration after initialization."""
        if self.model is not None and self.returns is not None:
            raise ConfigError("--model and --returns are mutually exclusive")
        if self.returns is not None and self.rf is None:
            raise ConfigError("--returns requires --rf")
        if self.model is None and self.returns is None:
            self.model = Path(settings.get('paper_instance_path'))
            logger.info(f"No model source given; using {self.model}")
        for name in ('model', 'returns'):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{name} file not found: {path}")
        for name in ('starts', 'max_iters', 'grid', 'samples'):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name.replace('_', '-')} must be >= 1, got {value}")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"unknown log level '{self.log_level}'")
        allowed = ('phi',) + tuple(c.key for c in self.criteria)
        if self.objective not in allowed:
            raise ConfigError(f"objective must be one of {list(allowed)}, got '{self.objective}'")
        extra = [c.key for c in self.criterion_shapes if c not in self.criteria]
        if extra:
            raise ConfigError(f"problem {self.problem.value} has no criteria {extra}")

    @property
    def criteria(self) -> Tuple[CriterionId, ...]:
        return self.problem.criteria

    @property
    def goal_specs(self) -> Dict[CriterionId, Tuple[str, str]]:
        """criterion -> (mu spec, nu spec), per-criterion keys over the global ones."""
        specs = {}
        for c in self.criteria:
            override = self.criterion_shapes.get(c, {})
            specs[c] = (override.get('mu', self.mu), override.get('nu', self.nu))
        return specs

    def solver_config(self) -> SolverConfig:
        """SolverConfig from settings defaults plus this run's overrides."""
        base = SolverConfig(**settings.solver_defaults)
        return base.with_overrides(seed=self.seed, n_starts=self.starts, max_iters=self.max_iters)

    def load_market_model(self) -> MarketModel:
        if self.returns is not None:
            return estimate_model(load_returns(self.returns), self.rf)
        return load_model(Path(self.model))

    def to_dict(self) -> Dict[str, Any]:
        """Config echo for reports (paths as given, no environment details)."""
        return {
            'model': str(self.model) if self.model is not None else None,
            'returns': str(self.returns) if self.returns is not None else None,
            'rf': self.rf,
            'problem': self.problem.value,
            'mode': self.mode.value,
            'goals': {c.key: {'mu': mu, 'nu': nu} for c, (mu, nu) in self.goal_specs.items()},
            'seed': self.seed,
            'starts': self.starts,
            'max_iters': self.max_iters,
            'oracle_check': self.oracle_check,
            'grid': self.grid,
            'samples': self.samples,
            'objective': self.objective,
        }

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> 'RunConfig':
        """
        Build from flag-named keys; None values are ignored.

        Raises:
            ConfigError: unknown key or unconvertible value
        """
        kwargs: Dict[str, Any] = {}
        shapes: Dict[CriterionId, Dict[str, str]] = {}
        for raw_key, raw_value in values.items():
            if raw_value is None:
                continue
            key = raw_key.strip().lower().lstrip('-').replace('-', '_')
            if key in _SHAPE_KEYS:
                role, c = _SHAPE_KEYS[key]
                shapes.setdefault(c, {})[role] = str(raw_value).strip()
                continue
            if key not in _CONVERTERS:
                raise ConfigError(f"unknown configuration key '{raw_key}'")
            try:
                kwargs[key] = _CONVERTERS[key](raw_value)
            except ValueError as e:
                raise ConfigError(f"bad value for '{raw_key}': {raw_value!r}") from e
        return cls(criterion_shapes=shapes, **kwargs)

    @classmethod
    def from_sources(cls, config_file: Optional[Union[str, Path]] = None,
                     flags: Optional[Mapping[str, Any]] = None) -> 'RunConfig':
        """Merge a key = value config file with command-line flags (flags win)."""
        merged: Dict[str, Any] = {}
        if config_file is not None:
            path = Path(config_file)
            if not path.is_file():
                raise ConfigError(f"config file not found: {path}")
            file_values = dotenv_values(path, encoding='utf-8')
            merged.update({k.strip().lower().replace('-', '_'): v for k, v in file_values.items()})
            logger.debug(f"Loaded {len(file_values)} keys from {path}")
        for key, value in (flags or {}).items():
            if value is not None:
                merged[key.strip().lower().replace('-', '_')] = value
        return cls.from_mapping(merged)
