"""Box-drawn plain-text tables for terminal reports."""


class Table:
    """Simple table layout for terminal output.

    Usage:
        table = Table(["n", "a_n", "q_n"])
        table.add_row([1, 1, 1])
        table.add_row([2, 2, 3])
        print(table.render())
    """

    HSEP = "─"
    VSEP = "│"
    TL = "┌"
    TR = "┐"
    BL = "└"
    BR = "┘"
    TJ = "┬"  # top junction
    BJ = "┴"  # bottom junction
    LJ = "├"  # left junction
    RJ = "┤"  # right junction
    CJ = "┼"  # cross junction

    MAX_WIDTH = 40

    def __init__(self, columns, widths=None, padding=1, borders=True, header=True):
        """
        Args:
            columns: list of column header strings
            widths: list of column widths (fitted to content if None)
            padding: spaces on each side of cell content
            borders: draw box borders around and between columns
            header: show header row with separator
        """
        self.columns = [str(c) for c in columns]
        self.padding = padding
        self.borders = borders
        self.show_header = header
        self.rows = []
        self.fixed_widths = list(widths) if widths else None

    def add_row(self, values):
        """Add a row; short rows are padded, long rows truncated."""
        row = [str(v) for v in values] + [""] * (len(self.columns) - len(values))
        self.rows.append(row[:len(self.columns)])

    @property
    def widths(self):
        if self.fixed_widths:
            return self.fixed_widths
        out = []
        for i, col in enumerate(self.columns):
            longest = max([len(col)] + [len(r[i]) for r in self.rows])
            out.append(min(longest, self.MAX_WIDTH) + 2 * self.padding)
        return out

    def _format_cell(self, text, width):
        text = str(text)
        pad = " " * self.padding
        inner_width = width - (self.padding * 2)
        if len(text) > inner_width:
            text = text[:inner_width - 1] + "…"
        return pad + text.ljust(inner_width) + pad

    def _make_separator(self, left, mid, right, fill):
        parts = [fill * w for w in self.widths]
        if self.borders:
            return left + mid.join(parts) + right
        return fill.join(parts)

    def _line(self, cells):
        widths = self.widths
        formatted = [self._format_cell(v, widths[i]) for i, v in enumerate(cells)]
        if self.borders:
            return self.VSEP + self.VSEP.join(formatted) + self.VSEP
        return " ".join(formatted)

    def render(self):
        """The table as a string, one line per row."""
        lines = []
        if self.borders:
            lines.append(self._make_separator(self.TL, self.TJ, self.TR, self.HSEP))
        if self.show_header:
            lines.append(self._line(self.columns))
            lines.append(self._make_separator(
                self.LJ if self.borders else "",
                self.CJ if self.borders else self.HSEP,
                self.RJ if self.borders else "",
                self.HSEP,
            ))
        for row in self.rows:
            lines.append(self._line(row))
        if self.borders:
            lines.append(self._make_separator(self.BL, self.BJ, self.BR, self.HSEP))
        return "\n".join(lines)

    def __str__(self):
        return self.render()
