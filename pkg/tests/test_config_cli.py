"""Unit tests for experiment configs, presets and the rlab entry point."""

import contextlib
import io
import os
import tempfile
import unittest

from rigidity_lab import __version__, config
from rigidity_lab.cli import EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, main, run
from rigidity_lab.config import ExperimentConfig, load, parse, preset, resolve
from rigidity_lab.db.database import RunsDB
from rigidity_lab.errors import ConfigError

SPIKE = "cf:[2,2,2,2,2,2,2,2,2,2,100]"


def run_cli(*argv):
    """(exit code, stdout) of one rlab invocation."""
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


class TestParse(unittest.TestCase):
    """Test the key = value format."""

    def test_preset_round_trip(self):
        for name in config.PRESETS:
            cfg = preset(name)
            self.assertEqual(parse(cfg.serialize()), cfg)

    def test_defaults_not_serialized(self):
        text = ExperimentConfig(subcommand="cf", depth=8).serialize()
        self.assertEqual(text, "subcommand = cf\ndepth = 8\n")

    def test_comments_and_types(self):
        cfg = parse("# acceptance rerun\nsubcommand = match  # inline\ntrials = 5\nepsilon = 0.02\n")
        self.assertEqual((cfg.subcommand, cfg.trials, cfg.epsilon), ("match", 5, 0.02))

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            parse("bogus = 1")

    def test_missing_equals(self):
        with self.assertRaises(ConfigError):
            parse("alpha")

    def test_empty(self):
        with self.assertRaises(ConfigError):
            parse("# nothing here\n\n")

    def test_bad_number(self):
        with self.assertRaises(ConfigError):
            parse("trials = many")

    def test_bad_mode(self):
        with self.assertRaises(ConfigError):
            parse("mode = fast")

    def test_duplicate_key_keeps_last(self):
        with self.assertLogs("rigidity_lab.config", level="WARNING"):
            cfg = parse("seed = 1\nseed = 2\n")
        self.assertEqual(cfg.seed, 2)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load("/nonexistent/rigidity.conf")

    def test_rate_keys_are_floats(self):
        cfg = parse("min_match = 0.5\nmin_lift = 0\ncoupling = diagonal\n")
        self.assertEqual((cfg.min_match, cfg.min_lift, cfg.coupling), (0.5, 0.0, "diagonal"))

    def test_bad_coupling(self):
        with self.assertRaises(ConfigError):
            parse("coupling = sideways")

    def test_rate_out_of_range(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig(min_match=1.5)


class TestConfigValues(unittest.TestCase):
    """Test accessors, overrides and presets."""

    def test_overrides_skip_none(self):
        cfg = ExperimentConfig(trials=7).with_overrides(trials=None, seed=3)
        self.assertEqual((cfg.trials, cfg.seed), (7, 3))

    def test_index_bounds(self):
        self.assertEqual(ExperimentConfig(index_range="2:9").index_bounds(), (2, 9))
        self.assertIsNone(ExperimentConfig().index_bounds())
        for bad in ("9:2", "x", "3"):
            with self.assertRaises(ConfigError):
                ExperimentConfig(index_range=bad).index_bounds()

    def test_bad_frequency(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig(alpha="golden").frequency("alpha")

    def test_unset_roof(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig().roof("roof_f")

    def test_unknown_preset(self):
        with self.assertRaises(ConfigError):
            preset("fastest")

    def test_resolve_overlays_preset(self):
        cfg = resolve(ExperimentConfig(preset="acceptance-unbounded", trials=10))
        self.assertEqual(cfg.trials, 10)
        self.assertEqual(cfg.alpha, config.DOUBLING)
        self.assertEqual(cfg.c, 0.05)

    def test_acceptance_presets(self):
        bounded = preset("acceptance-bounded")
        self.assertEqual((bounded.alpha, bounded.branch), (config.SILVER, "bounded"))
        contrast = preset("contrast-equal-jumps")
        self.assertEqual(contrast.roof("roof_g").jump, contrast.roof("roof_f").jump)
        identical = preset("contrast-equal-jumps-match")
        self.assertEqual((identical.subcommand, identical.coupling), ("match", "diagonal"))
        self.assertEqual((identical.alpha, identical.roof_g), (identical.beta, identical.roof_f))


class TestCli(unittest.TestCase):
    """Test rlab subcommands end to end."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_version(self):
        code, out = run_cli("version")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), f"rigidity-lab {__version__}")

    def test_no_command_prints_help(self):
        code, out = run_cli()
        self.assertEqual(code, EXIT_OK)
        self.assertIn("usage", out)

    def test_cf_csv(self):
        path = self.path("cf.csv")
        code, _ = run_cli("cf", "--alpha", "cf:[1]", "--depth", "5", "--out", path)
        self.assertEqual(code, EXIT_OK)
        with open(path) as fh:
            lines = fh.read().splitlines()
        self.assertTrue(lines[0].startswith("# rigidity-lab"))
        self.assertEqual(lines[1], "n,a_n,q_n,p_n")
        self.assertEqual([line.split(",")[2] for line in lines[2:]], ["1", "2", "3", "5", "8"])

    def test_cf_deterministic(self):
        texts = []
        for name in ("a.csv", "b.csv"):
            run_cli("cf", "--alpha", config.DOUBLING, "--depth", "12", "--out", self.path(name))
            with open(self.path(name)) as fh:
                texts.append(fh.read().splitlines()[1:])
        self.assertEqual(texts[0], texts[1])

    def test_ostrowski(self):
        code, out = run_cli("ostrowski", "-n", "4", "--alpha", "cf:[1]")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("✓ 4 =", out)

    def test_ostrowski_needs_n(self):
        code, out = run_cli("ostrowski")
        self.assertEqual(code, EXIT_CONFIG)
        self.assertIn("✖ Config error", out)

    def test_bad_frequency_is_config_error(self):
        code, _ = run_cli("cf", "--alpha", "golden")
        self.assertEqual(code, EXIT_CONFIG)

    def test_run_empty_file(self):
        path = self.path("empty.conf")
        open(path, "w").close()
        code, _ = run_cli("run", path)
        self.assertEqual(code, EXIT_CONFIG)

    def test_run_config_file(self):
        path = self.path("cf.conf")
        with open(path, "w") as fh:
            fh.write("subcommand = cf\nalpha = cf:[2,...]\ndepth = 4\n")
        code, out = run_cli("run", path, "--out", "-")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("4,2,17,12", out)

    def test_run_without_subcommand(self):
        path = self.path("bare.conf")
        with open(path, "w") as fh:
            fh.write("seed = 4\n")
        code, _ = run_cli("run", path)
        self.assertEqual(code, EXIT_CONFIG)

    def test_run_from_config_object(self):
        path = self.path("direct.csv")
        cfg = ExperimentConfig(subcommand="cf", alpha="cf:[1]", depth=3, out=path)
        with contextlib.redirect_stdout(io.StringIO()):
            self.assertEqual(run(cfg), EXIT_OK)
        self.assertTrue(os.path.exists(path))
        with self.assertRaises(ConfigError):
            run(ExperimentConfig())

    def test_coboundary_equal_jumps(self):
        code, out = run_cli("coboundary", "--roof-g", config.ROOF_G_EQUAL,
                            "--max-harmonic", "8", "--out", self.path("cob.csv"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("cohomologous", out)

    def test_match_without_scale_fails(self):
        # golden alpha has no large partial quotient to build E_k on
        code, out = run_cli("match", "--trials", "1", "--no-record")
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertIn("ScaleUnavailable", out)

    def test_match_records_run(self):
        db_path = self.path("runs.db")
        code, _ = run_cli("match", "--alpha", SPIKE, "--trials", "2", "--min-match", "0",
                          "--db", db_path, "--out", self.path("match.csv"))
        self.assertEqual(code, EXIT_OK)
        db = RunsDB(db_path)
        try:
            runs = db.get_runs()
            self.assertEqual(len(runs), 1)
            self.assertEqual((runs[0]["subcommand"], runs[0]["trials"]), ("match", 2))
            self.assertEqual(len(db.get_trials(runs[0]["id"])), 2)
        finally:
            db.close()

    def test_identical_flows_fail_match(self):
        code, out = run_cli("match", "--alpha", SPIKE, "--beta", SPIKE, "--roof-g", config.ROOF_F,
                            "--coupling", "diagonal", "--trials", "2", "--no-record",
                            "--out", self.path("same.csv"))
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertIn("✖", out)

    def test_coboundary_truncated_transfer_fails(self):
        code, out = run_cli("coboundary", "--roof-g", "jump=1.0; c0=1.0; k:3=0.1,0.0",
                            "--max-harmonic", "1", "--out", self.path("cob.csv"))
        self.assertEqual(code, EXIT_VIOLATION)
        self.assertIn("✖ Transfer residual", out)

    def test_coboundary_unequal_jumps(self):
        code, out = run_cli("coboundary", "--max-harmonic", "8", "--out", self.path("cob.csv"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("✓ Verdict disjoint", out)

    def test_runs_path(self):
        db_path = self.path("ledger.db")
        code, out = run_cli("runs", "path", "--db", db_path)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), db_path)

    def test_runs_missing_database(self):
        code, out = run_cli("runs", "stats", "--db", self.path("missing.db"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("not found", out)


if __name__ == "__main__":
    unittest.main()
