"""Behave test environment setup for rigidity-lab."""

import os
import shutil
import sys

# Ensure src/ is on the path so rigidity_lab is importable
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))


def before_all(context):
    """Set up test-wide context."""
    context.test_data = {}


def before_scenario(context, scenario):
    """Reset per-scenario state."""
    context.test_data = {}
    context.exit_code = None
    context.output = None
    context.error = None


def after_scenario(context, scenario):
    """Close ledgers and remove scratch directories."""
    db = context.test_data.get("db")
    if db is not None:
        db.close()
    tmpdir = context.test_data.get("tmpdir")
    if tmpdir:
        shutil.rmtree(tmpdir, ignore_errors=True)
