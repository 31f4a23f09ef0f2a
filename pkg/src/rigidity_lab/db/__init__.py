"""Run ledger for rigidity-lab experiments."""

from rigidity_lab.db.database import RunsDB
from rigidity_lab.db.history import RunHistory
from rigidity_lab.db.recorder import RunRecorder

__all__ = [
    "RunsDB",
    "RunRecorder",
    "RunHistory",
]
