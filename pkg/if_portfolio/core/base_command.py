#!/usr/bin/env python3
"""
Base command class providing common functionality for the portfolio tools.

Commands inherit output directory management, deterministic JSON and text
writers, and a timed execute() wrapper that logs failures before
re-raising them.

Features:
- JSON encoder for numpy scalars/arrays, enums and dataclass-like objects
- Floats rounded to 12 significant digits, fixed key order, no timestamps
- Banner-framed pandas tables for terminal output
"""

import json
import logging
import math
import time
from abc import ABC, abstractmethod
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12
BANNER = "=" * 72


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round a finite float to `digits` significant digits; other values pass through."""
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def to_jsonable(obj: Any) -> Any:
    """
    Convert reports into plain JSON types.

    Objects exposing to_dict() are expanded, numpy values become Python
    numbers and lists, enums become their values, and every float is
    rounded to 12 significant digits. Non-finite floats become None.
    """
    if hasattr(obj, 'to_dict') and not isinstance(obj, (pd.DataFrame, pd.Series)):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k.value if isinstance(k, Enum) else k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Enum):
        return to_jsonable(obj.value)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return round_significant(value) if math.isfinite(value) else None
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, 'tolist'):
        return to_jsonable(obj.tolist())
    return obj


def dumps_report(data: Any) -> str:
    """Serialize a report deterministically (stable for byte comparison)."""
    return json.dumps(to_jsonable(data), indent=2, ensure_ascii=False) + "\n"


def format_table(title: str, frame: pd.DataFrame, float_format: str = '{:.6g}') -> str:
    """Render a DataFrame inside the standard banner."""
    body = frame.to_string(float_format=float_format.format) if not frame.empty else "(empty)"
    return f"{BANNER}\n{title}\n{BANNER}\n{body}\n"


class BaseCommand(ABC):
    """Base class for CLI commands with common output handling."""

    def __init__(self, output_dir: Union[str, Path] = "output"):
        """
        Initialize base command.

        Args:
            output_dir: Directory for report files
        """
        self.output_dir = Path(output_dir)
        self.logger = logging.getLogger(self.__class__.__name__)
        self.results: Dict[str, Any] = {}

    def ensure_output_directory(self) -> None:
        """Create output directory if it doesn't exist."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.logger.debug(f"Output directory ensured: {self.output_dir}")

    def resolve_path(self, filename: Union[str, Path]) -> Path:
        """Strings name files inside output_dir; Path objects are used as given."""
        if isinstance(filename, str):
            self.ensure_output_directory()
            return self.output_dir / filename
        filename.parent.mkdir(parents=True, exist_ok=True)
        return filename

    def save_json_results(self, data: Any, filename: Union[str, Path]) -> Path:
        """
        Save results to a JSON file (deterministic formatting).

        Args:
            data: Report data, anything to_jsonable() accepts
            filename: See resolve_path()

        Returns:
            Path to saved file
        """
        filepath = self.resolve_path(filename)
        try:
            filepath.write_text(dumps_report(data), encoding='utf-8')
            self.logger.info(f"Results saved to: {filepath}")
            return filepath
        except OSError as e:
            self.logger.error(f"Failed to save results to {filepath}: {e}")
            raise

    def save_text_results(self, content: str, filename: Union[str, Path]) -> Path:
        """Save text results to file."""
        filepath = self.resolve_path(filename)
        try:
            filepath.write_text(content, encoding='utf-8')
            self.logger.info(f"Text results saved to: {filepath}")
            return filepath
        except OSError as e:
            self.logger.error(f"Failed to save text to {filepath}: {e}")
            raise

    @abstractmethod
    def run(self) -> Dict[str, Any]:
        """
        Run the command. Must be implemented by subclasses.

        Returns:
            Report dictionary (JSON-serializable through to_jsonable)
        """

    def render(self, report: Dict[str, Any]) -> str:
        """Human-readable rendering of the report; subclasses override."""
        return dumps_report(report)

    def execute(self, out: Optional[Union[str, Path]] = None,
                table_out: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
        """
        Run the command, print the table, write the JSON report and the
        rendered table if requested.

        Failures are logged and re-raised; timings go to the log only.
        """
        self.logger.info(f"Starting {self.__class__.__name__}")
        started = time.perf_counter()
        try:
            report = self.run()
        except Exception as e:
            self.logger.error(f"{self.__class__.__name__} failed: {e}")
            raise
        self.results = report
        table = self.render(report)
        print(table)
        if out is not None:
            self.save_json_results(report, out)
        if table_out is not None:
            self.save_text_results(table + "\n", table_out)
        self.logger.info(f"{self.__class__.__name__} finished in {time.perf_counter() - started:.2f} seconds")
        return report
