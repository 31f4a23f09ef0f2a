"""SQLite run ledger: connection, schema and retention for rigidity-lab."""

import os
import sqlite3
import time


# State directory; RIGIDITY_LAB_HOME overrides it
HOME_ENV = "RIGIDITY_LAB_HOME"
DEFAULT_DB_DIR = os.path.expanduser("~/.rigidity_lab")
DB_NAME = "runs.db"

# Schema version
SCHEMA_VERSION = 1

# Retention: 90 days in seconds
RETENTION_SECONDS = 90 * 24 * 3600

SCHEMA_SQL = """
CREATE TABLE IF NOT EXISTS schema_version (
    version INTEGER NOT NULL
);

CREATE TABLE IF NOT EXISTS runs (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    timestamp REAL NOT NULL,
    subcommand TEXT NOT NULL,
    preset TEXT DEFAULT '',
    mode TEXT DEFAULT '',
    branch TEXT DEFAULT '',
    config TEXT DEFAULT '',
    trials INTEGER DEFAULT 0,
    successes INTEGER DEFAULT 0,
    lift_successes INTEGER DEFAULT 0
);

CREATE TABLE IF NOT EXISTS trials (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    run_id INTEGER NOT NULL REFERENCES runs(id) ON DELETE CASCADE,
    trial_index INTEGER NOT NULL,
    direction TEXT DEFAULT '',
    case_path TEXT DEFAULT '',
    m_prime INTEGER,
    l_prime INTEGER,
    p REAL,
    q REAL,
    residual_f REAL,
    residual_g REAL,
    verified INTEGER DEFAULT 0,
    lifted INTEGER DEFAULT 0,
    failure TEXT DEFAULT ''
);

CREATE INDEX IF NOT EXISTS idx_runs_ts ON runs(timestamp);
CREATE INDEX IF NOT EXISTS idx_runs_preset ON runs(preset);
CREATE INDEX IF NOT EXISTS idx_trials_run ON trials(run_id);
"""


def default_db_path():
    """runs.db under $RIGIDITY_LAB_HOME, or ~/.rigidity_lab."""
    home = os.environ.get(HOME_ENV)
    base = os.path.expanduser(home) if home else DEFAULT_DB_DIR
    return os.path.join(base, DB_NAME)


class RunsDB:
    """SQLite database of experiment runs and their trials."""

    def __init__(self, db_path=None):
        if db_path is None:
            db_path = default_db_path()
        self.db_path = db_path

        db_dir = os.path.dirname(self.db_path)
        if db_dir:
            os.makedirs(db_dir, exist_ok=True)

        self.conn = sqlite3.connect(self.db_path)
        self.conn.row_factory = sqlite3.Row
        self.conn.execute("PRAGMA journal_mode=WAL")
        self.conn.execute("PRAGMA foreign_keys=ON")
        self._init_schema()

    def _init_schema(self):
        cursor = self.conn.cursor()
        cursor.executescript(SCHEMA_SQL)
        cursor.execute("SELECT COUNT(*) FROM schema_version")
        if cursor.fetchone()[0] == 0:
            cursor.execute(
                "INSERT INTO schema_version (version) VALUES (?)",
                (SCHEMA_VERSION,),
            )
        self.conn.commit()

    def execute(self, sql, params=()):
        return self.conn.execute(sql, params)

    def executemany(self, sql, params_list):
        return self.conn.executemany(sql, params_list)

    def commit(self):
        self.conn.commit()

    def fetchone(self, sql, params=()):
        return self.conn.execute(sql, params).fetchone()

    def fetchall(self, sql, params=()):
        return self.conn.execute(sql, params).fetchall()

    def schema_version(self):
        row = self.fetchone("SELECT version FROM schema_version LIMIT 1")
        return row[0] if row else None

    def prune(self, max_age_seconds=None):
        """Delete runs (and their trials) older than max_age_seconds (default 90 days).

        Returns the number of runs removed.
        """
        if max_age_seconds is None:
            max_age_seconds = RETENTION_SECONDS
        cutoff = time.time() - max_age_seconds
        self.conn.execute(
            "DELETE FROM trials WHERE run_id IN (SELECT id FROM runs WHERE timestamp < ?)",
            (cutoff,),
        )
        cur = self.conn.execute("DELETE FROM runs WHERE timestamp < ?", (cutoff,))
        self.conn.commit()
        return cur.rowcount

    def get_runs(self, limit=20, preset=None):
        """Most recent runs first."""
        if preset is None:
            return self.fetchall(
                "SELECT * FROM runs ORDER BY timestamp DESC, id DESC LIMIT ?", (limit,)
            )
        return self.fetchall(
            "SELECT * FROM runs WHERE preset = ? ORDER BY timestamp DESC, id DESC LIMIT ?",
            (preset, limit),
        )

    def get_trials(self, run_id):
        return self.fetchall(
            "SELECT * FROM trials WHERE run_id = ? ORDER BY trial_index", (run_id,)
        )

    def get_stats(self):
        """Row counts and on-disk size."""
        runs = self.fetchone("SELECT COUNT(*) FROM runs")[0]
        trials = self.fetchone("SELECT COUNT(*) FROM trials")[0]
        oldest = self.fetchone("SELECT MIN(timestamp) FROM runs")[0]
        size = os.path.getsize(self.db_path) if os.path.exists(self.db_path) else 0
        return {"runs": runs, "trials": trials, "oldest": oldest, "size_bytes": size}

    def close(self):
        if self.conn:
            self.conn.close()
            self.conn = None
