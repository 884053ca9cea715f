"""
Report writer implementation.

This module provides the Report container and the ReportWriter class that
renders bound records as CSV or JSON and saves reports and adversary tables.
"""

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from quadbound.src.bounds import BoundRecord
from quadbound.src.error_handler import UsageError

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("name", "kind", "c", "n", "N", "weight", "value", "provenance")
FORMATS = ("csv", "json")


def _format_number(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class Report:
    """Records produced by one command plus the failures it observed."""

    command: str
    records: List[BoundRecord] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add(self, record: BoundRecord) -> None:
        self.records.append(record)

    def extend(self, records: Iterable[BoundRecord]) -> None:
        self.records.extend(records)

    def sorted_records(self) -> List[BoundRecord]:
        return sorted(self.records, key=lambda r: r.sort_key() + (r.kind, r.params.get("weight", "")))

    @property
    def ok(self) -> bool:
        return not self.failures

    def find(self, name: str, **params: Any) -> List[BoundRecord]:
        """Records with the given name whose params match the given values."""
        return [
            r for r in self.records
            if r.name == name and all(r.params.get(k) == v for k, v in params.items())
        ]


class ReportWriter:
    """
    Renders reports and saves them to the file system.

    Rendering is deterministic: records are sorted by (name, c, n) and JSON
    keys are sorted.
    """

    def __init__(self, base_dir: Optional[str] = None) -> None:
        """Initialize the ReportWriter with an optional base directory."""
        self.base_dir = Path(base_dir) if base_dir else None
        if self.base_dir is not None:
            self.base_dir.mkdir(parents=True, exist_ok=True)
        logger.debug(f"Initialized ReportWriter with base directory: {self.base_dir}")

    def render(self, report: Report, fmt: str) -> str:
        """
        Render a report in the given format.

        Raises:
            UsageError: For an unknown format
        """
        if fmt == "csv":
            return self.render_csv(report)
        if fmt == "json":
            return self.render_json(report)
        raise UsageError(f"Unknown report format '{fmt}' (use csv or json)")

    def render_csv(self, report: Report) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in report.sorted_records():
            params = record.params
            writer.writerow([
                record.name,
                record.kind,
                _format_number(params.get("c")),
                _format_number(params.get("n")),
                _format_number(params.get("N")),
                params.get("weight", ""),
                _format_number(float(record.value)),
                record.provenance,
            ])
        return buffer.getvalue()

    def render_json(self, report: Report) -> str:
        payload = {
            "command": report.command,
            "records": [r.to_dict() for r in report.sorted_records()],
            "failures": report.failures,
            "metadata": report.metadata,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def save_report(self, report: Report, fmt: str, path: Optional[str] = None) -> Path:
        """
        Save a rendered report.

        A path with a .csv or .json suffix is used as the file; any other
        path (or the base directory) is a directory receiving <command>.<fmt>.

        Args:
            report: The report to save
            fmt: "csv" or "json"
            path: Target file or directory

        Returns:
            Path of the written file
        """
        target = self._target_path(path, f"{report.command}.{fmt}")
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8") as f:
                f.write(self.render(report, fmt))
            logger.info(f"Saved {report.command} report to {target}")
            return target
        except OSError as e:
            logger.error(f"Error saving report: {e}")
            raise

    def save_adversary_table(self, c: float, n: int, table: Sequence[Tuple[float, float]],
                             descriptor: Dict[str, Any], path: Optional[str] = None) -> Tuple[Path, Path]:
        """Save the sampled adversary as adversary_c{c}_n{n}.csv plus its .json descriptor."""
        directory = self.output_directory(path)
        directory.mkdir(parents=True, exist_ok=True)
        stem = f"adversary_c{c:g}_n{n}"
        table_path = directory / f"{stem}.csv"
        with open(table_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(("x", "f0"))
            for x, value in table:
                writer.writerow((repr(float(x)), repr(float(value))))
        descriptor_path = directory / f"{stem}.json"
        with open(descriptor_path, "w", encoding="utf-8") as f:
            f.write(json.dumps(descriptor, sort_keys=True, indent=2) + "\n")
        logger.info(f"Saved adversary table to {table_path}")
        return table_path, descriptor_path

    def output_directory(self, path: Optional[str] = None) -> Path:
        if path is None:
            if self.base_dir is None:
                raise UsageError("No output directory configured")
            return self.base_dir
        p = Path(path)
        return p.parent if p.suffix in (".csv", ".json") else p

    def _target_path(self, path: Optional[str], default_name: str) -> Path:
        if path is not None and Path(path).suffix in (".csv", ".json"):
            return Path(path)
        return self.output_directory(path) / default_name


def load_json_report(text: str) -> Report:
    """Rebuild a Report from its JSON rendering."""
    payload = json.loads(text)
    records = [
        BoundRecord(r["name"], r["kind"], r["value"], r["params"], r["provenance"])
        for r in payload["records"]
    ]
    return Report(payload["command"], records, payload.get("failures", []), payload.get("metadata", {}))
