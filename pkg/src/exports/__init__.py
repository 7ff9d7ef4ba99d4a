"""Report generation module."""

from .generate_reports import (
    ReportWriter,
    export_to_csv,
    export_to_json,
    export_to_xlsx,
    run_parameters,
    run_summary,
)
from .summary_pdf import SummaryPdf

__all__ = [
    "ReportWriter",
    "SummaryPdf",
    "export_to_csv",
    "export_to_json",
    "export_to_xlsx",
    "run_parameters",
    "run_summary",
]
