"""CSV artifacts with a single timestamped comment line before the header."""

import csv
import io
import os
from datetime import datetime, timezone

from rigidity_lab import __version__


def csv_header_comment(now=None):
    now = now or datetime.now(timezone.utc)
    return f"# rigidity-lab {__version__} generated {now.strftime('%Y-%m-%dT%H:%M:%SZ')}"


def format_value(v):
    """Stable text for CSV cells: repr for floats, empty for None."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(header, rows, now=None):
    buf = io.StringIO()
    buf.write(csv_header_comment(now) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, now=None):
    """Write rows to path ('-' for stdout) and return the text written."""
    text = render_csv(header, rows, now)
    if path in (None, "-"):
        print(text, end="")
        return text
    out_dir = os.path.dirname(path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
