"""Fixed-precision number rendering and atomic JSON/CSV writers."""

from enum import Enum
from pathlib import Path

import csv
import io
import json
import logging
import math
import os
import tempfile

import numpy as np
from pydantic import BaseModel

from orlicz_lab.verify.checks import CheckStatus, VerificationReport


logger = logging.getLogger(__name__)

DIGITS = ".12g"
CSV_COLUMNS = ("name", "lhs", "rhs", "slack", "relative_slack", "passed", "seed", "grid")


def format_number(x: float) -> str:
    """12 significant digits; inf, -inf and nan spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, DIGITS)


def to_jsonable(obj):
    """Walk reports, dicts and sequences; finite floats are rounded to 12 digits, the rest become strings."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        text = format_number(obj)
        return text if text in ("inf", "-inf", "nan") else float(text)
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(item) for item in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def atomic_write_text(path: Path, text: str) -> Path:
    """Write through a temporary file in the target directory and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temporary = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as file:
            file.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.unlink(temporary)
        raise
    logger.debug(f"wrote {path}")
    return path


def write_json(path: Path, obj) -> Path:
    return atomic_write_text(path, dumps(obj))


def passed_label(report: VerificationReport) -> str:
    if report.status is CheckStatus.SKIPPED:
        return "skipped"
    return "true" if report.passed else "false"


def csv_row(report: VerificationReport) -> list[str]:
    return [
        report.name,
        format_number(report.lhs),
        format_number(report.rhs),
        format_number(report.slack),
        format_number(report.relative_slack),
        passed_label(report),
        "" if report.seed is None else str(report.seed),
        report.grid,
    ]


def render_csv(reports: list[VerificationReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(csv_row(report) for report in reports)
    return buffer.getvalue()


def write_csv(path: Path, reports: list[VerificationReport]) -> Path:
    return atomic_write_text(path, render_csv(reports))
