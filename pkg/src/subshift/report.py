"""Report envelope and its CSV / JSON serializations.

CSV cells carry 9 significant digits; JSON carries full float precision.
Both are byte-stable for identical inputs. Wall-clock timings are kept out
of the envelope and written to a separate sidecar file.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .errors import OutputError

SCHEMA = "subshift-report/1"


def _clean(x):
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return x + 0.0  # drop negative zero
    if isinstance(x, (list, tuple)):
        return [_clean(t) for t in x]
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    return x


@dataclass
class ReportEnvelope:
    experiment: str
    config: dict[str, Any]
    sample: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]
    verdicts: list[dict[str, Any]] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    version: str = __version__
    schema: str = SCHEMA
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.rows = [list(_clean(r)) for r in self.rows]
        self.diagnostics = _clean(dict(self.diagnostics))
        self.details = _clean(dict(self.details))
        self.verdicts = [_clean(dict(v)) for v in self.verdicts]

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("timings")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ReportEnvelope:
        d = json.loads(text)
        return cls(**d)

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts)


def format_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def csv_text(report: ReportEnvelope) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([format_cell(x) for x in row])
    return buf.getvalue()


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(report: ReportEnvelope, path) -> None:
    _write(Path(path), csv_text(report))


def emit_json(report: ReportEnvelope, path) -> None:
    _write(Path(path), report.to_json())


def emit_timings(report: ReportEnvelope, path) -> None:
    _write(Path(path), json.dumps(report.timings, indent=2) + "\n")


def load_report(path) -> ReportEnvelope:
    return ReportEnvelope.from_json(Path(path).read_text(encoding="utf-8"))
