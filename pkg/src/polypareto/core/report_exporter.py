"""
Report export functionality for polypareto.
"""

import csv
import json
import logging
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import jsonschema
import numpy as np

from ..config.manager import ConfigurationManager
from .tangency import TangencyTrace, trace_to_rows

logger = logging.getLogger(__name__)

SCHEMA_RESOURCE = "report.schema.json"


class ReportValidationError(Exception):
    """Raised when a report does not match the published schema."""
    pass


def to_jsonable(value: Any) -> Any:
    """
    Convert a report tree into plain JSON types.

    numpy arrays and scalars become lists and Python numbers, tuples become
    lists, rationals become [numerator, denominator] and non-finite floats
    become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return [value.numerator, value.denominator]
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isnan(number):
            return "nan"
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return number
    return value


class ReportSchema:
    """Validator for the shipped report JSON-Schema document."""

    _schema: Optional[Dict[str, Any]] = None

    @classmethod
    def schema(cls) -> Dict[str, Any]:
        if cls._schema is None:
            text = resources.files("polypareto.resources.schemas").joinpath(SCHEMA_RESOURCE).read_text(encoding="utf-8")
            cls._schema = json.loads(text)
        return cls._schema

    @classmethod
    def validate_report(cls, report: Dict[str, Any]) -> None:
        """
        Validate a JSON-ready report.

        Raises:
            ReportValidationError: If the report violates the schema
        """
        try:
            jsonschema.validate(instance=report, schema=cls.schema())
        except jsonschema.ValidationError as e:
            path = "/".join(str(p) for p in e.absolute_path) or "<root>"
            raise ReportValidationError(f"Report invalid at {path}: {e.message}")


class ReportExporter:
    """Export analysis reports as JSON documents and trace CSV files."""

    def __init__(self, config_manager: Optional[ConfigurationManager] = None):
        self.config_manager = config_manager
        self.supported_formats = ['json', 'csv']
        self.indent = int(config_manager.get('output.indent', 2)) if config_manager else 2

        logger.debug("ReportExporter initialized")

    def build_report(
        self,
        command: str,
        result: Dict[str, Any],
        seed: int,
        budget: Dict[str, Any],
    ) -> Dict[str, Any]:
        """Wrap a result with the run metadata and convert it to JSON types."""
        return to_jsonable({
            'command': command,
            'seed': seed,
            'budget': budget,
            'result': result,
        })

    def render_json(self, report: Dict[str, Any]) -> str:
        """Deterministic text of a report (sorted keys, configured indent, trailing newline)."""
        return json.dumps(report, indent=self.indent, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"

    def export_json(self, report: Dict[str, Any], output_path: Path) -> bool:
        """
        Validate and write a report.

        Args:
            report: JSON-ready report from build_report
            output_path: Destination file

        Returns:
            True if export successful, False otherwise
        """
        try:
            ReportSchema.validate_report(report)
            output_path = Path(output_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(output_path, 'w', encoding='utf-8') as f:
                f.write(self.render_json(report))

            logger.info(f"JSON export completed: {output_path}")
            return True

        except (ReportValidationError, OSError, ValueError) as e:
            logger.error(f"Error exporting JSON: {e}")
            return False

    def export_traces_csv(self, traces: Sequence[TangencyTrace], output_dir: Path) -> List[Path]:
        """
        Write one ``trace_<index>.csv`` per trace into a directory.

        Returns:
            Paths written; empty when nothing was written
        """
        output_dir = Path(output_dir)
        written: List[Path] = []
        if not traces:
            logger.warning("No traces to export")
            return written
        try:
            output_dir.mkdir(parents=True, exist_ok=True)
            for index, trace in enumerate(traces):
                header, rows = trace_to_rows(trace)
                path = output_dir / f"trace_{index}.csv"
                with open(path, 'w', newline='', encoding='utf-8') as f:
                    writer = csv.writer(f)
                    writer.writerow(header)
                    writer.writerows([[repr(float(v)) for v in row] for row in rows])
                written.append(path)

            logger.info(f"CSV export completed: {len(written)} traces in {output_dir}")
        except OSError as e:
            logger.error(f"Error exporting CSV: {e}")
        return written
