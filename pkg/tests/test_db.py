"""Unit tests for the run ledger: schema, recording, trends and pruning."""

import os
import tempfile
import time
import unittest

from rigidity_lab.config import ExperimentConfig
from rigidity_lab.db.database import SCHEMA_VERSION, RunsDB, default_db_path
from rigidity_lab.db.history import ARROW_DOWN, ARROW_STABLE, ARROW_UP, NO_DATA, RunHistory
from rigidity_lab.db.recorder import RunRecorder
from rigidity_lab.dynamics.joining import CorrelationReport, CorrelationRow
from rigidity_lab.matching.criterion import CriterionReport, TrialResult
from rigidity_lab.matching.windows import MatchingWindow, WindowCheck
from rigidity_lab.runner import TrialFailure


def make_report(outcomes):
    """CriterionReport from a list of failure labels (None = success)."""
    results = []
    for i, failure in enumerate(outcomes):
        if failure == "error":
            results.append(TrialFailure(i, "RuntimeError: boom"))
            continue
        window = MatchingWindow(100 + i, 1, 1.0, 0.5, 1, "case1-sub2")
        check = WindowCheck(window, 1e-4, 2e-4, True, True, 0.05, failure)
        results.append(TrialResult(i, None, check, None, "forward", failure))
    return CriterionReport(len(outcomes), results)


class DBTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.db = RunsDB(os.path.join(self.tmp.name, "sub", "runs.db"))

    def tearDown(self):
        self.db.close()
        self.tmp.cleanup()


class TestSchema(DBTestCase):
    """Test database creation."""

    def test_creates_parent_directory(self):
        self.assertTrue(os.path.exists(self.db.db_path))

    def test_schema_version(self):
        self.assertEqual(self.db.schema_version(), SCHEMA_VERSION)

    def test_reopen_keeps_single_version_row(self):
        self.db.close()
        self.db = RunsDB(self.db.db_path)
        rows = self.db.fetchall("SELECT * FROM schema_version")
        self.assertEqual(len(rows), 1)

    def test_home_override(self):
        old = os.environ.get("RIGIDITY_LAB_HOME")
        os.environ["RIGIDITY_LAB_HOME"] = self.tmp.name
        try:
            self.assertEqual(default_db_path(), os.path.join(self.tmp.name, "runs.db"))
        finally:
            if old is None:
                del os.environ["RIGIDITY_LAB_HOME"]
            else:
                os.environ["RIGIDITY_LAB_HOME"] = old

    def test_empty_stats(self):
        stats = self.db.get_stats()
        self.assertEqual((stats["runs"], stats["trials"]), (0, 0))
        self.assertIsNone(stats["oldest"])


class TestRecorder(DBTestCase):
    """Test recording criterion and joining reports."""

    def test_record_criterion(self):
        cfg = ExperimentConfig(subcommand="match", preset="acceptance-unbounded")
        run_id = RunRecorder(self.db).record_criterion(
            make_report([None, "residual-f", "error"]), cfg)
        run = self.db.get_runs()[0]
        self.assertEqual(run["id"], run_id)
        self.assertEqual((run["trials"], run["successes"]), (3, 1))
        self.assertEqual(run["preset"], "acceptance-unbounded")
        self.assertIn("preset = acceptance-unbounded", run["config"])

        trials = self.db.get_trials(run_id)
        self.assertEqual([t["trial_index"] for t in trials], [0, 1, 2])
        self.assertEqual(trials[0]["verified"], 1)
        self.assertEqual(trials[0]["m_prime"], 100)
        self.assertEqual(trials[1]["failure"], "residual-f")
        self.assertEqual(trials[1]["verified"], 0)
        self.assertIsNone(trials[2]["m_prime"])
        self.assertEqual(trials[2]["failure"], "error")

    def test_record_joining(self):
        rows = (CorrelationRow(0, 0.01, 0.0, 0.0, 0.01), CorrelationRow(1, 0.5, 0.0, 0.0, 0.5))
        report = CorrelationReport(100.0, 2, "a", "b", 0.25, 0.0, 0.255, 0.2, rows)
        run_id = RunRecorder(self.db).record_joining(report)
        run = self.db.fetchone("SELECT * FROM runs WHERE id = ?", (run_id,))
        self.assertEqual((run["subcommand"], run["trials"], run["successes"]), ("joining", 2, 1))
        self.assertEqual(self.db.get_trials(run_id), [])


class TestHistory(DBTestCase):
    """Test success-rate arrows between runs of a preset."""

    def record(self, outcomes, preset="acceptance-unbounded"):
        cfg = ExperimentConfig(subcommand="match", preset=preset)
        return RunRecorder(self.db).record_criterion(make_report(outcomes), cfg)

    def test_single_run_has_no_trend(self):
        self.record([None, None])
        self.assertEqual(RunHistory(self.db).get_trend("acceptance-unbounded"), NO_DATA)

    def test_arrows(self):
        history = RunHistory(self.db)
        self.record([None, "residual-g"])
        self.record([None, None])
        self.assertEqual(history.get_trend("acceptance-unbounded"), ARROW_UP)
        self.record([None, None])
        self.assertEqual(history.get_trend("acceptance-unbounded"), ARROW_STABLE)
        self.record(["not-in-P", "not-in-P"])
        self.assertEqual(history.get_trend("acceptance-unbounded"), ARROW_DOWN)

    def test_run_trends_per_preset(self):
        self.record([None, "error"], preset="acceptance-bounded")
        self.record([None, None])
        self.record([None, None], preset="acceptance-bounded")
        trends = RunHistory(self.db).run_trends()
        self.assertEqual(len(trends), 3)
        newest, middle, oldest = trends
        self.assertEqual(newest[0]["preset"], "acceptance-bounded")
        self.assertEqual(newest[1], ARROW_UP)
        self.assertEqual(middle[1], NO_DATA)
        self.assertEqual(oldest[1], NO_DATA)

    def test_unnamed_runs(self):
        RunRecorder(self.db).record_criterion(make_report([None]))
        (row, arrow), = RunHistory(self.db).run_trends()
        self.assertEqual(arrow, NO_DATA)
        self.assertEqual(row["config"], "")


class TestPrune(DBTestCase):
    """Test retention of old runs."""

    def test_prune_removes_old_runs_and_trials(self):
        recorder = RunRecorder(self.db)
        old = recorder.record_criterion(make_report([None, None]))
        recorder.record_criterion(make_report([None]))
        self.db.execute("UPDATE runs SET timestamp = ? WHERE id = ?",
                        (time.time() - 100 * 24 * 3600, old))
        self.db.commit()
        self.assertEqual(self.db.prune(), 1)
        stats = self.db.get_stats()
        self.assertEqual((stats["runs"], stats["trials"]), (1, 1))

    def test_prune_nothing_recent(self):
        RunRecorder(self.db).record_criterion(make_report([None]))
        self.assertEqual(self.db.prune(), 0)


if __name__ == "__main__":
    unittest.main()
