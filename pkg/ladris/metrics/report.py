# ladris/metrics/report.py

import json
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

from rich.table import Table

from ..models import PRECISION_THRESHOLDS, MetricsReport

COLUMNS = tuple(f"P@{t:.1f}" for t in PRECISION_THRESHOLDS) + ("oIoU", "mIoU")


def report_values(report: MetricsReport) -> Sequence[float]:
    """Report values in table column order, as percentages."""
    values = [report.precision(t) for t in PRECISION_THRESHOLDS] + [report.oiou, report.miou]
    return [100.0 * v for v in values]


def write_report_json(report: MetricsReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.model_dump(), indent=2) + "\n", encoding="utf-8")
    return path


def render_text_table(reports: Dict[str, MetricsReport], label_header: str = "Split") -> str:
    """Aligned plain-text table, one row per labelled report."""
    header = [label_header] + list(COLUMNS) + ["N"]
    rows = [
        [label] + [f"{v:.2f}" for v in report_values(report)] + [str(report.n_samples)]
        for label, report in reports.items()
    ]
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]

    def line(cells):
        return "  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(cells, widths)))

    separator = "  ".join("-" * w for w in widths)
    return "\n".join([line(header), separator] + [line(row) for row in rows]) + "\n"


def render_rich_table(reports: Dict[str, MetricsReport], title: Optional[str] = None) -> Table:
    table = Table(title=title)
    table.add_column("Split", style="bold")
    for column in COLUMNS:
        table.add_column(column, justify="right")
    table.add_column("N", justify="right")
    for label, report in reports.items():
        table.add_row(label, *[f"{v:.2f}" for v in report_values(report)], str(report.n_samples))
    return table
