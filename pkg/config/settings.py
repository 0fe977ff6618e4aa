#!/usr/bin/env python3
"""
Centralized Configuration Management for the portfolio tools

Provides unified handling of logging, output, solver and oracle defaults
from environment variables (and a local .env file).
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

REPO_ROOT = Path(__file__).resolve().parent.parent


class PortfolioSettings:
    """Centralized configuration management for the CLI and dashboard."""

    def __init__(self):
        """Initialize configuration from environment variables."""
        self._config: Dict[str, Any] = {}

        # Logging & output
        self._config.update({
            'log_level': os.getenv('LOG_LEVEL', 'INFO').upper(),
            'output_dir': os.getenv('OUTPUT_DIR', 'output'),
            'paper_instance_path': os.getenv(
                'PAPER_INSTANCE_PATH', str(REPO_ROOT / 'data' / 'paper_instance.txt')),
        })

        # Solver
        self._config.update({
            'solver_max_iters': int(os.getenv('SOLVER_MAX_ITERS', '50000')),
            'solver_n_starts': int(os.getenv('SOLVER_N_STARTS', '16')),
            'solver_seed': int(os.getenv('SOLVER_SEED', '20240601')),
            'solver_tol_step': float(os.getenv('SOLVER_TOL_STEP', '1e-10')),
            'solver_tol_obj': float(os.getenv('SOLVER_TOL_OBJ', '1e-12')),
        })

        # Oracle
        self._config.update({
            'oracle_samples': int(os.getenv('ORACLE_SAMPLES', '1000000')),
            'oracle_grid': int(os.getenv('ORACLE_GRID', '12')),
            'oracle_seed': int(os.getenv('ORACLE_SEED', '20240601')),
            'oracle_point_cap': int(os.getenv('ORACLE_POINT_CAP', '10000000')),
        })

    @property
    def solver_defaults(self) -> Dict[str, Any]:
        """Keyword arguments for SolverConfig."""
        return {
            'max_iters': self._config['solver_max_iters'],
            'n_starts': self._config['solver_n_starts'],
            'seed': self._config['solver_seed'],
            'tol_step': self._config['solver_tol_step'],
            'tol_obj': self._config['solver_tol_obj'],
        }

    @property
    def oracle_defaults(self) -> Dict[str, int]:
        """Default oracle cloud sizes."""
        return {
            'samples': self._config['oracle_samples'],
            'grid': self._config['oracle_grid'],
            'seed': self._config['oracle_seed'],
            'point_cap': self._config['oracle_point_cap'],
        }

    @property
    def output_config(self) -> Dict[str, str]:
        """Get logging and output configuration."""
        return {
            'log_level': self._config['log_level'],
            'output_dir': self._config['output_dir'],
            'paper_instance_path': self._config['paper_instance_path'],
        }

    def get(self, key: str, default: Optional[Any] = None) -> Any:
        """Get configuration value by key."""
        return self._config.get(key, default)


# Global configuration instance
settings = PortfolioSettings()
