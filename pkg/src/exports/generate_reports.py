"""
Report Generation

Writes experiment artifacts into a run directory:

- report.json: full run document (parameters, entropy summaries, every
  trial with its hash coefficients, verdict)
- trials.csv / sweep.csv: one row per trial or per epsilon, fixed header
- report.xlsx (optional): styled trial sheet with a summary block
- summary.pdf (optional): one-page run summary, see summary_pdf

JSON and CSV contain no timestamps; equal configs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Optional

from src.attack import TRIAL_CSV_HEADER

logger = logging.getLogger(__name__)


# =============================================================================
# JSON Export
# =============================================================================

def export_to_json(document: dict, output_path: Optional[Path] = None) -> str:
    """
    Serialize a report document.

    Returns JSON content as string. Optionally writes to file.
    """
    content = json.dumps(document, indent=2, allow_nan=False) + "\n"
    if output_path:
        Path(output_path).write_text(content, encoding="utf-8")
    return content


# =============================================================================
# CSV Export
# =============================================================================

def export_to_csv(header: list[str], rows: list[list], output_path: Optional[Path] = None) -> str:
    """
    Export a table to CSV.

    Returns CSV content as string. Optionally writes to file.
    """
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    content = output.getvalue()

    if output_path:
        with open(output_path, "w", newline="", encoding="utf-8") as f:
            f.write(content)

    return content


# =============================================================================
# Excel Export
# =============================================================================

def export_to_xlsx(
    header: list[str],
    rows: list[list],
    summary: list[tuple[str, object]],
    output_path: Optional[Path] = None,
    title: str = "Trials",
) -> bytes:
    """
    Export a table and a summary block to Excel with formatting.

    Returns XLSX bytes. Optionally writes to file.
    """
    import openpyxl
    from openpyxl.styles import Alignment, Font, PatternFill
    from openpyxl.utils import get_column_letter

    wb = openpyxl.Workbook()
    ws = wb.active
    ws.title = title

    # Styles
    header_fill = PatternFill(start_color="1a1a2e", end_color="1a1a2e", fill_type="solid")
    header_font = Font(bold=True, color="FFFFFF")
    total_font = Font(bold=True)
    pass_fill = PatternFill(start_color="e8f5e9", end_color="e8f5e9", fill_type="solid")
    fail_fill = PatternFill(start_color="fce4ec", end_color="fce4ec", fill_type="solid")
    number_format = "0.000000"

    for col, name in enumerate(header, 1):
        cell = ws.cell(row=1, column=col, value=name)
        cell.fill = header_fill
        cell.font = header_font
        cell.alignment = Alignment(horizontal="center")

    for row_idx, row in enumerate(rows, 2):
        for col, value in enumerate(row, 1):
            cell = ws.cell(row=row_idx, column=col, value=value)
            if isinstance(cell.value, float):
                cell.number_format = number_format

    # Summary section
    summary_row = len(rows) + 3
    ws.cell(row=summary_row, column=1, value="SUMMARY").font = Font(bold=True, size=12)
    for offset, (label, value) in enumerate(summary, 1):
        ws.cell(row=summary_row + offset, column=1, value=label).font = total_font
        cell = ws.cell(row=summary_row + offset, column=2, value=value)
        if label == "Verdict":
            cell.font = total_font
            cell.fill = fail_fill if value == "failed" else pass_fill

    for col in range(1, len(header) + 1):
        ws.column_dimensions[get_column_letter(col)].width = 14 if col > 2 else 18

    ws.freeze_panes = "A2"

    buffer = io.BytesIO()
    wb.save(buffer)
    xlsx_bytes = buffer.getvalue()

    if output_path:
        with open(output_path, "wb") as f:
            f.write(xlsx_bytes)

    return xlsx_bytes


# =============================================================================
# Report Writer (Orchestrator)
# =============================================================================

class ReportWriter:
    """
    Writes run artifacts into one output directory.

    Usage:
        writer = ReportWriter("runs/pushforward")
        paths = writer.write_run(result)
    """

    def __init__(self, output_dir: str | Path):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, name: str) -> Path:
        return self.output_dir / name

    def write_run(self, result) -> dict[str, str]:
        """Write report.json, trials.csv and the optional XLSX / PDF for an ExperimentResult."""
        estimate = result.estimate
        rows = [report.to_csv_row() for report in estimate.reports]
        paths = {
            "report": self._path("report.json"),
            "trials": self._path("trials.csv"),
        }
        export_to_json(result.report(), paths["report"])
        export_to_csv(TRIAL_CSV_HEADER, rows, paths["trials"])

        summary = run_summary(result)
        if result.config.xlsx:
            paths["xlsx"] = self._path("report.xlsx")
            export_to_xlsx(TRIAL_CSV_HEADER, rows, summary, paths["xlsx"])
        if result.config.pdf:
            from .summary_pdf import SummaryPdf

            paths["pdf"] = self._path("summary.pdf")
            SummaryPdf().render(
                "Attack run",
                parameters=run_parameters(result),
                results=summary,
                verdict=result.verdict,
                output_path=paths["pdf"],
            )

        logger.info(f"Wrote {len(paths)} artifact(s) to {self.output_dir}")
        return {name: str(path) for name, path in paths.items()}

    def write_sweep(self, result) -> dict[str, str]:
        """Write sweep.json and sweep.csv (plus optional XLSX / PDF) for a SweepResult."""
        from src.harness.experiments import SWEEP_CSV_HEADER

        rows = [row.to_csv_row() for row in result.rows]
        paths = {
            "report": self._path("sweep.json"),
            "sweep": self._path("sweep.csv"),
        }
        export_to_json(result.report(), paths["report"])
        export_to_csv(SWEEP_CSV_HEADER, rows, paths["sweep"])

        summary = [
            ("Rows", len(result.rows)),
            ("Feasible", sum(1 for row in result.rows if row.feasible)),
            ("Verdict", result.verdict),
        ]
        if result.config.xlsx:
            paths["xlsx"] = self._path("sweep.xlsx")
            export_to_xlsx(SWEEP_CSV_HEADER, rows, summary, paths["xlsx"], title="Sweep")
        if result.config.pdf:
            from .summary_pdf import SummaryPdf

            paths["pdf"] = self._path("sweep.pdf")
            SummaryPdf().render(
                "Tradeoff sweep",
                parameters=[("Scenario", result.config.scenario), ("n", result.config.n),
                            ("k", result.config.k), ("delta", result.config.delta),
                            ("Trials per row", result.config.trials), ("Seed", result.config.seed)],
                results=summary,
                verdict=result.verdict,
                output_path=paths["pdf"],
            )

        logger.info(f"Wrote {len(paths)} sweep artifact(s) to {self.output_dir}")
        return {name: str(path) for name, path in paths.items()}


def run_parameters(result) -> list[tuple[str, object]]:
    params = result.estimate.params
    return [
        ("Scenario", result.config.scenario),
        ("n", params.n),
        ("k", params.k),
        ("delta", params.delta),
        ("T", params.T),
        ("Trials", result.config.trials),
        ("Seed", result.config.seed),
    ]


def run_summary(result) -> list[tuple[str, object]]:
    estimate = result.estimate
    return [
        ("Bound", f"{estimate.params.bound:.6g}"),
        ("Mean advantage", f"{estimate.mean_advantage:.6g}"),
        ("Success fraction", f"{estimate.fraction:.4f}"),
        ("Wilson lower (95%)", f"{estimate.lower:.4f}"),
        ("Guarantee", "yes" if estimate.guarantee else "no"),
        ("Smooth entropy below k", "yes" if estimate.smooth_entropy_below_k else "no"),
        ("Certificate", f"{estimate.certificate:.6g}"),
        ("Verdict", result.verdict),
    ]
