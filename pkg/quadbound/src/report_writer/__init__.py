"""
Report writer module.

This module provides rendering of bound reports to CSV and JSON and saving
reports and adversary tables to the file system.
"""

from quadbound.src.report_writer.report_writer import (
    CSV_COLUMNS,
    FORMATS,
    Report,
    ReportWriter,
    load_json_report,
)

__all__ = ["CSV_COLUMNS", "FORMATS", "Report", "ReportWriter", "load_json_report"]
