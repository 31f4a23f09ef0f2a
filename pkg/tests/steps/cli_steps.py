"""Step definitions shared by rlab command scenarios."""

import contextlib
import io
import os
import shlex
import tempfile

from behave import when, then

from rigidity_lab.cli import main


@when('I run rlab with "{command}"')
def step_run_rlab(context, command):
    tmpdir = context.test_data.setdefault("tmpdir", tempfile.mkdtemp())
    out_path = os.path.join(tmpdir, "out.csv")
    db_path = os.path.join(tmpdir, "runs.db")
    context.test_data["out_path"] = out_path
    context.test_data["db_path"] = db_path
    argv = []
    for word in shlex.split(command):
        argv.append({"FILE": out_path, "DB": db_path}.get(word, word))
    if "--db" not in argv and argv[0] in ("match", "lift", "joining"):
        argv.append("--no-record")
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        context.exit_code = main(argv)
    context.output = buf.getvalue()


@then("the exit code should be {code:d}")
def step_exit_code(context, code):
    assert context.exit_code == code, (
        f"Exit code {context.exit_code}, expected {code}\n{context.output}"
    )


@then("the CSV should have {rows:d} data rows")
def step_csv_rows(context, rows):
    with open(context.test_data["out_path"]) as fh:
        lines = [line for line in fh.read().splitlines() if line and not line.startswith("#")]
    assert len(lines) - 1 == rows, f"{len(lines) - 1} data rows"


@then('the output should contain "{text}"')
def step_output_contains(context, text):
    assert text in context.output, f"{text!r} not in output:\n{context.output}"
