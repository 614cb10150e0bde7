# -*- coding: utf-8 -*-
"""
Check Reports

Collects named pass/fail checks for one CLI run and renders them as
JSON, CSV or text.

Features:
- Numeric, boolean and bound checks with the tolerance recorded
- Deterministic JSON (sorted keys, fixed separators, trailing newline)
- Flat CSV projection of the checks array
- Exit code 0 iff every check passed
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import csv
import io
import json
import logging
import math

import numpy as np

from cli_config import SCHEMA_VERSION, OutputFormat

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2

CSV_HEADER = ['name', 'status', 'observed', 'expected', 'tolerance']


# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True)
class CheckRecord:
    """
    Attributes:
        name: stable lower_snake_case identifier
        passed: outcome
        observed: value the run produced
        expected: reference value or bound description
        tolerance: allowed deviation, None for exact checks
    """
    name: str
    passed: bool
    observed: Any
    expected: Any
    tolerance: Optional[float] = None

    @property
    def status(self) -> str:
        return 'pass' if self.passed else 'fail'

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'status': self.status,
            'observed': to_plain(self.observed),
            'expected': to_plain(self.expected),
            'tolerance': to_plain(self.tolerance),
        }


@dataclass
class Report:
    """
    Checks and payload of one run.

    Attributes:
        command: subcommand name
        config: resolved configuration echo
        checks: ordered check records
        data: command-specific payload (marginals, violations, rows)
        duration_seconds: only set when timing is requested
    """
    command: str
    config: Dict
    checks: List[CheckRecord] = field(default_factory=list)
    data: Dict = field(default_factory=dict)
    duration_seconds: Optional[float] = None

    # ------------------------------------------------------------------
    # recording
    # ------------------------------------------------------------------

    def check_close(self, name: str, observed: float, expected: float,
                    tolerance: float) -> CheckRecord:
        """|observed - expected| <= tolerance"""
        observed, expected = float(observed), float(expected)
        passed = math.isfinite(observed) and abs(observed - expected) <= tolerance
        return self._add(CheckRecord(name, bool(passed), observed, expected, tolerance))

    def check_at_most(self, name: str, observed: float, bound: float,
                      tolerance: float = 0.0) -> CheckRecord:
        """observed <= bound + tolerance"""
        observed = float(observed)
        passed = math.isfinite(observed) and observed <= bound + tolerance
        return self._add(CheckRecord(name, bool(passed), observed, f"<= {bound!r}", tolerance))

    def check_at_least(self, name: str, observed: float, bound: float,
                       tolerance: float = 0.0) -> CheckRecord:
        """observed >= bound - tolerance"""
        observed = float(observed)
        passed = math.isfinite(observed) and observed >= bound - tolerance
        return self._add(CheckRecord(name, bool(passed), observed, f">= {bound!r}", tolerance))

    def check_equal(self, name: str, observed: Any, expected: Any) -> CheckRecord:
        """Exact equality for integers, booleans and strings"""
        return self._add(CheckRecord(name, bool(observed == expected), observed, expected))

    def _add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        if not record.passed:
            logger.warning(f"Check failed: {record.name} observed={record.observed!r} "
                           f"expected={record.expected!r}")
        return record

    # ------------------------------------------------------------------
    # summary
    # ------------------------------------------------------------------

    @property
    def passed_count(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def failed_count(self) -> int:
        return len(self.checks) - self.passed_count

    @property
    def all_passed(self) -> bool:
        return self.failed_count == 0

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.all_passed else EXIT_CHECK_FAILED

    def to_dict(self) -> Dict:
        data = {
            'schema_version': SCHEMA_VERSION,
            'command': self.command,
            'config': to_plain(self.config),
            'checks': [c.to_dict() for c in self.checks],
            'summary': {
                'total': len(self.checks),
                'passed': self.passed_count,
                'failed': self.failed_count,
            },
            'data': to_plain(self.data),
        }
        if self.duration_seconds is not None:
            data['duration_seconds'] = self.duration_seconds
        return data

    # ------------------------------------------------------------------
    # rendering
    # ------------------------------------------------------------------

    def render(self, output_format: OutputFormat) -> str:
        if output_format == OutputFormat.JSON:
            return render_json(self.to_dict())
        if output_format == OutputFormat.CSV:
            return self._render_csv()
        return self._render_text()

    def _render_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for c in self.checks:
            row = c.to_dict()
            writer.writerow([row['name'], row['status'], _cell(row['observed']),
                             _cell(row['expected']), _cell(row['tolerance'])])
        return buffer.getvalue()

    def _render_text(self) -> str:
        lines = []
        for c in self.checks:
            row = c.to_dict()
            lines.append(f"{c.status.upper()} {c.name} observed={_cell(row['observed'])} "
                         f"expected={_cell(row['expected'])} tol={_cell(row['tolerance'])}")
        lines.append(f"{self.command}: {self.passed_count}/{len(self.checks)} checks passed")
        return '\n'.join(lines) + '\n'


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def to_plain(value: Any) -> Any:
    """
    Converts numpy scalars / arrays, tuples and nested dicts into JSON types.

    Complex numbers become [re, im]; non-finite floats become strings so
    the JSON stays standard.
    """
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_plain(float(value.real)), to_plain(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    return value


def render_json(payload: Dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(',', ':'), ensure_ascii=False) + '\n'


def write_output(text: str, path: Optional[str], stream) -> None:
    """Writes to `path` (UTF-8) or to `stream`"""
    if path is None:
        stream.write(text)
        stream.flush()
        return
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info(f"Report written to {path}")


def _cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, separators=(',', ':'))
