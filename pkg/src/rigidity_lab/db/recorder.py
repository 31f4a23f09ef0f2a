"""Record experiment reports into the run ledger."""

import time


class RunRecorder:
    """Records criterion and joining reports into the runs database."""

    def __init__(self, db):
        self.db = db

    def _insert_run(self, subcommand, config, trials, successes, lift_successes,
                    mode="", branch=""):
        cur = self.db.execute(
            "INSERT INTO runs "
            "(timestamp, subcommand, preset, mode, branch, config, trials, "
            "successes, lift_successes) "
            "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
            (time.time(), subcommand, getattr(config, "preset", "") or "",
             mode, branch, config.serialize() if config is not None else "",
             trials, successes, lift_successes),
        )
        return cur.lastrowid

    def record_criterion(self, report, config=None, subcommand="match"):
        """Record a CriterionReport with one row per trial. Returns the run id."""
        const = report.constants
        mode = const.mode.value if const is not None else ""
        branch = const.branch.value if const is not None else ""
        run_id = self._insert_run(subcommand, config, report.trials, report.successes,
                                  report.lift_successes, mode, branch)
        rows = []
        for r in report.results:
            check = getattr(r, "check", None)
            window = check.window if check is not None else None
            lift = getattr(r, "lift", None)
            rows.append((
                run_id,
                r.index,
                getattr(r, "direction", ""),
                window.case if window else "",
                window.M if window else None,
                window.L if window else None,
                window.p if window else None,
                window.q if window else None,
                check.residual_f if check is not None else None,
                check.residual_g if check is not None else None,
                int(check is not None and check.passed),
                int(lift is not None and lift.passed),
                r.failure or "",
            ))
        self.db.executemany(
            "INSERT INTO trials "
            "(run_id, trial_index, direction, case_path, m_prime, l_prime, p, q, "
            "residual_f, residual_g, verified, lifted, failure) "
            "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
            rows,
        )
        self.db.commit()
        return run_id

    def record_joining(self, report, config=None, threshold=0.1):
        """Record a correlation report; a start counts as a success when its
        gap is within threshold (the diagonal control records no successes)."""
        good = 0 if report.diagonal else sum(1 for r in report.rows if abs(r.gap) <= threshold)
        run_id = self._insert_run("joining", config, report.samples, good, 0)
        self.db.commit()
        return run_id
