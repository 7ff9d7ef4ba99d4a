"""
Run Summary PDF

One-page summary of an attack run or sweep: parameter table, results
table and the acceptance verdict. Uses ReportLab; documents are built with
``invariant=1`` so equal inputs give equal bytes.
"""

from __future__ import annotations

import io
import logging
from pathlib import Path
from typing import Optional

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import (
    HRFlowable,
    Paragraph,
    SimpleDocTemplate,
    Spacer,
    Table,
    TableStyle,
)

from src import __version__

logger = logging.getLogger(__name__)

VERDICT_COLORS = {
    "passed": "#2e7d32",
    "failed": "#c62828",
    "vacuous": "#6d6d6d",
}


class SummaryPdf:
    """Renders run summaries as PDF."""

    def __init__(self):
        styles = getSampleStyleSheet()
        self.title_style = ParagraphStyle(
            "SummaryTitle",
            parent=styles["Heading1"],
            fontSize=22,
            textColor=colors.HexColor("#1a1a2e"),
            spaceAfter=6,
        )
        self.heading_style = ParagraphStyle(
            "SectionHeading",
            parent=styles["Heading2"],
            fontSize=12,
            textColor=colors.HexColor("#4a4a6a"),
            spaceBefore=12,
            spaceAfter=6,
        )
        self.footer_style = ParagraphStyle(
            "Footer",
            parent=styles["Normal"],
            fontSize=9,
            textColor=colors.HexColor("#888888"),
            alignment=TA_CENTER,
        )

    def _table(self, rows: list[tuple[str, object]]) -> Table:
        table = Table([[label, str(value)] for label, value in rows], colWidths=[3.5 * inch, 3.5 * inch])
        table.setStyle(TableStyle([
            ("FONTNAME", (0, 0), (-1, -1), "Helvetica"),
            ("FONTSIZE", (0, 0), (-1, -1), 10),
            ("TEXTCOLOR", (0, 0), (0, -1), colors.HexColor("#666666")),
            ("ALIGN", (1, 0), (1, -1), "RIGHT"),
            ("LINEBELOW", (0, 0), (-1, -1), 0.25, colors.HexColor("#e0e0e0")),
            ("TOPPADDING", (0, 0), (-1, -1), 4),
            ("BOTTOMPADDING", (0, 0), (-1, -1), 4),
            ("LEFTPADDING", (0, 0), (-1, -1), 0),
            ("RIGHTPADDING", (0, 0), (-1, -1), 0),
        ]))
        return table

    def render(
        self,
        title: str,
        parameters: list[tuple[str, object]],
        results: list[tuple[str, object]],
        verdict: str,
        output_path: Optional[Path] = None,
    ) -> bytes:
        """
        Build the summary document.

        Returns:
            PDF bytes (also written to ``output_path`` when given)
        """
        buffer = io.BytesIO()
        doc = SimpleDocTemplate(
            buffer,
            pagesize=letter,
            rightMargin=0.75 * inch,
            leftMargin=0.75 * inch,
            topMargin=0.75 * inch,
            bottomMargin=0.75 * inch,
            invariant=1,
            title=title,
        )

        elements = [
            Paragraph(title.upper(), self.title_style),
            HRFlowable(width="100%", thickness=1, color=colors.HexColor("#e0e0e0"), spaceAfter=0.2 * inch),
            Paragraph("PARAMETERS", self.heading_style),
            self._table(parameters),
            Spacer(1, 0.2 * inch),
            Paragraph("RESULTS", self.heading_style),
            self._table(results),
            Spacer(1, 0.3 * inch),
        ]

        verdict_color = VERDICT_COLORS.get(verdict, "#1a1a2e")
        elements.append(Paragraph(
            f'Verdict: <font color="{verdict_color}"><b>{verdict.upper()}</b></font>',
            self.heading_style,
        ))
        elements.append(Spacer(1, 0.5 * inch))
        elements.append(Paragraph(f"pseudoentropy toolkit {__version__}", self.footer_style))

        doc.build(elements)
        pdf_bytes = buffer.getvalue()

        if output_path:
            with open(output_path, "wb") as f:
                f.write(pdf_bytes)
            logger.info(f"Generated summary: {output_path}")

        return pdf_bytes
