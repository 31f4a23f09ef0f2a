"""Plain-text tables and CSV artifacts."""

from rigidity_lab.report.csvout import csv_header_comment, write_csv
from rigidity_lab.report.table import Table

__all__ = [
    "Table",
    "write_csv",
    "csv_header_comment",
]
