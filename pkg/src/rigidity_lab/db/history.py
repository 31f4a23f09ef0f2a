"""Success-rate trends between recorded runs."""


# Arrow indicators
ARROW_UP = "\u2191"    # ↑
ARROW_DOWN = "\u2193"  # ↓
ARROW_STABLE = "\u2192"  # →
NO_DATA = "--"

# Relative change below which a rate counts as stable
STABLE_THRESHOLD = 0.05


class RunHistory:
    """Compare success rates of the latest runs of a preset."""

    def __init__(self, db):
        self.db = db

    def _get_trend_arrow(self, current, previous):
        if previous is None or current is None:
            return NO_DATA
        diff = current - previous
        if previous > 0:
            if abs(diff) / previous < STABLE_THRESHOLD:
                return ARROW_STABLE
        elif abs(diff) < STABLE_THRESHOLD:
            return ARROW_STABLE
        if diff > 0:
            return ARROW_UP
        if diff < 0:
            return ARROW_DOWN
        return ARROW_STABLE

    @staticmethod
    def success_rate(row):
        return row["successes"] / row["trials"] if row["trials"] else None

    def get_trend(self, preset, subcommand=None):
        """Arrow for the two latest runs of a preset, NO_DATA with fewer."""
        sql = "SELECT trials, successes FROM runs WHERE preset = ?"
        params = [preset]
        if subcommand:
            sql += " AND subcommand = ?"
            params.append(subcommand)
        sql += " ORDER BY timestamp DESC, id DESC LIMIT 2"
        rows = self.db.fetchall(sql, tuple(params))
        if len(rows) < 2:
            return NO_DATA
        return self._get_trend_arrow(self.success_rate(rows[0]), self.success_rate(rows[1]))

    def run_trends(self, limit=20):
        """(row, arrow) pairs for the latest runs, each compared with the
        preceding run of the same preset and subcommand."""
        rows = self.db.get_runs(limit)
        out = []
        for row in rows:
            if not row["preset"]:
                out.append((row, NO_DATA))
                continue
            prev = self.db.fetchone(
                "SELECT trials, successes FROM runs "
                "WHERE preset = ? AND subcommand = ? AND (timestamp < ? OR "
                "(timestamp = ? AND id < ?)) ORDER BY timestamp DESC, id DESC LIMIT 1",
                (row["preset"], row["subcommand"], row["timestamp"], row["timestamp"], row["id"]),
            )
            arrow = NO_DATA if prev is None else self._get_trend_arrow(
                self.success_rate(row), self.success_rate(prev)
            )
            out.append((row, arrow))
        return out
