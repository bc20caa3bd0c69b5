"""Experiment reports: CSV and JSON-lines emission and the console summary."""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .utils import InvalidParams, atomic_write_text

FLOAT_PRECISION = 6
FORMATS = ("csv", "jsonl")


@dataclass
class Report:
    """Rows produced by one subcommand, with the configuration that made them."""

    command: str
    config: dict[str, Any]
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def checks(self) -> list[bool]:
        """Pass flags of the rows that carry a bound check."""
        return [bool(row["pass"]) for row in self.rows if row.get("pass") is not None]

    @property
    def passed(self) -> bool:
        return all(self.checks)

    @property
    def failure_count(self) -> int:
        return sum(1 for ok in self.checks if not ok)

    def add(self, row: dict[str, Any]) -> None:
        unknown = set(row) - set(self.columns)
        if unknown:
            raise InvalidParams(
                "row has columns outside the report", unknown=sorted(unknown)
            )
        self.rows.append(row)


def _format_value(value: Any) -> str:
    """Cell text with a fixed float precision."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.{FLOAT_PRECISION}f}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return round(value, FLOAT_PRECISION)
    if isinstance(value, bool | int | str) or value is None:
        return value
    return str(value)


def to_csv(report: Report) -> str:
    """CSV text; an empty report still has its header line."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_format_value(row.get(c)) for c in report.columns])
    return buffer.getvalue()


def to_jsonl(report: Report) -> str:
    """One metadata line followed by one line per row."""
    meta = {
        "type": "meta",
        "command": report.command,
        "config": {k: _json_value(v) for k, v in sorted(report.config.items())},
        "seconds": round(report.seconds, 3),
        "passed": report.passed,
    }
    lines = [json.dumps(meta, sort_keys=True)]
    for row in report.rows:
        record = {c: _json_value(row.get(c)) for c in report.columns}
        lines.append(json.dumps(record))
    return "\n".join(lines) + "\n"


def emit(report: Report, fmt: str, path: Path | str) -> Path:
    """Write the report atomically in the given format."""
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "jsonl":
        text = to_jsonl(report)
    else:
        raise InvalidParams("unknown report format", format=fmt, choices=FORMATS)
    atomic_write_text(path, text)
    return Path(path)


def print_console_report(report: Report, key_columns: list[str] | None = None) -> None:
    """Print the rows with a pass mark, then a final status line."""
    shown = key_columns or report.columns
    print("\n" + "=" * 60)
    print(f"DETERMINATION DEPTH RESULTS: {report.command}")
    print("=" * 60 + "\n")

    for row in report.rows:
        ok = row.get("pass")
        mark = "  " if ok is None else ("✅" if ok else "❌")
        cells = ", ".join(
            f"{c}={_format_value(row.get(c))}" for c in shown if c != "pass"
        )
        print(f"{mark} {cells}")
    if not report.rows:
        print("No rows.")

    print("\n" + "=" * 60)
    status = "all checks passed" if report.passed else f"{report.failure_count} failed"
    print(f"{len(report.rows)} rows, {status} ({report.seconds:.2f}s)")
    print("=" * 60 + "\n")
