"""Report formatters."""

import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Protocol

from logictext.dataset_io import atomic_write_text


class Report(Protocol):
    """Anything that can be rendered as a table."""

    @property
    def title(self) -> str: ...

    @property
    def columns(self) -> tuple[str, ...]: ...

    def rows(self) -> list[tuple[Any, ...]]: ...

    def summary(self) -> str: ...

    def to_record(self) -> dict[str, Any]: ...


class Reporter(Protocol):
    """Protocol for report renderers."""

    def render(self, reports: Sequence[Report]) -> str:
        """Render one or more reports as a single document."""
        ...


class JSONReporter:
    """JSON format reporter.

    A single report renders as its record, several as an array of records.
    """

    def render(self, reports: Sequence[Report]) -> str:
        records = [report.to_record() for report in reports]
        payload: Any = records[0] if len(records) == 1 else records
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


class MarkdownReporter:
    """Markdown format reporter."""

    def render(self, reports: Sequence[Report]) -> str:
        """
        Render each report as a Markdown table under its own heading.

        Args:
            reports: Reports to render

        Returns:
            Markdown document
        """
        lines: list[str] = []
        for report in reports:
            lines.extend([f"## {report.title}", "", f"**{report.summary()}**", ""])
            rows = report.rows()
            if not rows:
                continue
            lines.append("| " + " | ".join(report.columns) + " |")
            lines.append("|" + "|".join("---" for _ in report.columns) + "|")
            for row in rows:
                cells = (str(cell).replace("|", "\\|") for cell in row)
                lines.append("| " + " | ".join(cells) + " |")
            lines.append("")
        return "\n".join(lines).rstrip("\n") + "\n"


class TextReporter:
    """Plain-text reporter with aligned columns."""

    def render(self, reports: Sequence[Report]) -> str:
        return "\n".join(render_table(report) for report in reports)


def render_table(report: Report) -> str:
    """
    Render a report as a column-aligned table.

    Args:
        report: Report to render

    Returns:
        Title, table and summary line
    """
    rows = [tuple(str(cell) for cell in row) for row in report.rows()]
    lines = [report.title, "=" * 80]
    if rows:
        widths = [
            max(len(column), *(len(row[i]) for row in rows))
            for i, column in enumerate(report.columns)
        ]
        lines.append("  ".join(c.ljust(w) for c, w in zip(report.columns, widths)).rstrip())
        lines.append("  ".join("-" * w for w in widths))
        for row in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        lines.append("-" * 80)
    lines.append(report.summary())
    return "\n".join(lines) + "\n"


REPORTERS: dict[str, Reporter] = {
    "json": JSONReporter(),
    "markdown": MarkdownReporter(),
    "md": MarkdownReporter(),
    "text": TextReporter(),
    "txt": TextReporter(),
}


def get_reporter(format: str) -> Reporter:
    """
    Look up the reporter for a format name.

    Raises:
        ValueError: If format is not supported
    """
    reporter = REPORTERS.get(format.lower())
    if reporter is None:
        raise ValueError(
            f"Unsupported format: {format}. Supported formats: {', '.join(REPORTERS)}"
        )
    return reporter


def format_from_path(path: Path, default: str = "json") -> str:
    """Report format implied by a file extension."""
    ext = path.suffix.lstrip(".").lower()
    return ext if ext in REPORTERS else default


def render_reports(reports: Sequence[Report], format: str = "text") -> str:
    """Render reports in the specified format."""
    return get_reporter(format).render(reports)


def export_report(
    report: Report | Sequence[Report],
    output_path: Path,
    format: str = "json",
) -> None:
    """
    Export one or more reports in the specified format.

    Args:
        report: Report, or reports written into one document
        output_path: Path to output file
        format: Report format (json, markdown, md, text, txt)

    Raises:
        ValueError: If format is not supported
    """
    reports = list(report) if isinstance(report, Sequence) else [report]
    atomic_write_text(output_path, render_reports(reports, format))
