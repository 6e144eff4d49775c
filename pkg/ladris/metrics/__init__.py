# ladris/metrics/__init__.py

from .calculator import MetricsAccumulator, compute_report, intersection_union, iou
from .report import COLUMNS, render_rich_table, render_text_table, report_values, write_report_json

__all__ = [
    'MetricsAccumulator', 'compute_report', 'intersection_union', 'iou',
    'COLUMNS', 'render_rich_table', 'render_text_table', 'report_values', 'write_report_json',
]
