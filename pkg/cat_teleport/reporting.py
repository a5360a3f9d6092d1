"""Deterministic JSON and CSV rendering of reports."""
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel

from .errors import ReportWriteFailed, UnsupportedFormat
from .model import ClosedFormCurve, ReportFormat, ScanReport, TeleportReport

logger = logging.getLogger(__name__)

INDENT = "  "


def format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"reports cannot carry the non-finite value {value}")
    return format(value, ".17g")


def _encode(value: Any, depth: int) -> str:
    pad = INDENT * (depth + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(key)}: {_encode(item, depth + 1)}" for key, item in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + INDENT * depth + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(isinstance(item, (int, float)) and not isinstance(item, bool) for item in value):
            return "[" + ", ".join(_encode(item, depth + 1) for item in value) + "]"
        return "[\n" + ",\n".join(pad + _encode(item, depth + 1) for item in value) + "\n" + INDENT * depth + "]"
    if isinstance(value, float):
        return format_float(value)
    return json.dumps(value)


def render_json(report: BaseModel) -> str:
    """Fields keep their declaration order and floats carry 17 significant digits."""
    data = report.model_dump(mode="json", by_alias=True, exclude_none=True)
    return _encode(data, 0) + "\n"


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render_csv(report: BaseModel) -> str:
    if isinstance(report, ScanReport):
        report = report.curve
    if isinstance(report, ClosedFormCurve):
        return _csv_text(["alpha", "value"],
                         [[format_float(a), format_float(v)] for a, v in zip(report.alpha, report.values)])
    if isinstance(report, TeleportReport):
        return _csv_text(["n", "m", "class", "probability", "fidelity"],
                         [[str(o.n), str(o.m), o.kind.value, format_float(o.probability), format_float(o.fidelity)]
                          for o in report.outcomes])
    raise UnsupportedFormat(f"{type(report).__name__} has no CSV form, use json")


def render(report: BaseModel, report_format: ReportFormat) -> str:
    return render_csv(report) if report_format is ReportFormat.CSV else render_json(report)


def emit_report(report: BaseModel, report_format: ReportFormat = ReportFormat.JSON,
                path: Optional[Path] = None) -> None:
    """Writes the report to ``path``, or to stdout when no path is given."""
    text = render(report, report_format)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise ReportWriteFailed(f"cannot write report to {path}: {e}") from e
    logger.info(f"Report written to {path}")
