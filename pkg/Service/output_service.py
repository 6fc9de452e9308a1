from pathlib import Path
from typing import Any, List, Optional, TextIO
import csv
import hashlib
import io
import json
import sys

from Config import TOOL_NAME, VERSION
from Entity.experiment import ExperimentConfig, ExperimentReport


def config_hash(config: ExperimentConfig) -> str:
    """sha256 of the canonical JSON of the config, output location excluded"""
    payload = json.dumps(config.model_dump(exclude={"out", "format"}), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def header_lines(config: ExperimentConfig, radix_label: str, depth: int) -> List[str]:
    return [
        f"# {TOOL_NAME} {VERSION} experiment={config.experiment}",
        f"# radix={radix_label} depth={depth} seed={config.seed} threads={config.threads}",
        f"# config_hash={config_hash(config)}",
    ]


def render_csv(columns: List[str], rows: List[List[Any]], comments: List[str]) -> str:
    buffer = io.StringIO()
    for line in comments:
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def render_json(report: ExperimentReport, header: List[str]) -> str:
    payload = {
        "header": [line.lstrip("# ") for line in header],
        "experiment": report.experiment,
        "summary": report.summary,
        "columns": report.columns,
        "rows": report.rows,
        "tables": report.tables,
    }
    return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"


def write_report(report: ExperimentReport, config: ExperimentConfig, radix_label: str, depth: int,
                 stream: Optional[TextIO] = None) -> List[str]:
    """Write a report to config.out (or stream/stdout); returns the paths written"""
    header = header_lines(config, radix_label, depth)
    if report.document is not None:
        text = json.dumps(report.document, sort_keys=True) + "\n"
        return _emit(text, config.out, stream)

    if config.format == "json":
        return _emit(render_json(report, header), config.out, stream)

    comments = header + [f"# {key}={_cell(value)}" for key, value in sorted(report.summary.items())]
    written = _emit(render_csv(report.columns, report.rows, comments), config.out, stream)
    for name, table in sorted(report.tables.items()):
        text = render_csv(table["columns"], table["rows"], header + [f"# table={name}"])
        if config.out:
            out = Path(config.out)
            written += _emit(text, str(out.with_name(f"{out.stem}.{name}.csv")), None)
        else:
            written += _emit(text, None, stream)
    return written


def _emit(text: str, path: Optional[str], stream: Optional[TextIO]) -> List[str]:
    if path:
        target = Path(path)
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        return [str(target)]
    (stream or sys.stdout).write(text)
    return []


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return float.__repr__(float(value))
    if isinstance(value, (list, tuple)):
        return " ".join(str(_cell(v)) for v in value)
    return value
