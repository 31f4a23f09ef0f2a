"""
runner.py — Fan-out of independent seeded trials.

Every trial is a pure function of (job, index, seed). Trials run on a
process pool through asyncio, failures are collected rather than raised,
and results come back ordered by trial index.
"""

import asyncio
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

THREADS_ENV = "RIGIDITY_LAB_THREADS"


@dataclass(frozen=True)
class TrialFailure:
    """Stand-in result for a trial whose worker raised."""

    index: int
    error: str
    failure: str = "error"

    @property
    def success(self):
        return False


def worker_count(requested=None):
    """min(cpu count, RIGIDITY_LAB_THREADS, requested)."""
    limits = [os.cpu_count() or 1]
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            limits.append(max(1, int(env)))
        except ValueError:
            log.warning("Ignoring non-integer %s=%r", THREADS_ENV, env)
    if requested:
        limits.append(max(1, int(requested)))
    return min(limits)


def trial_seeds(seed, trials):
    """Independent child seeds, one per trial."""
    return np.random.SeedSequence(seed).spawn(trials)


class TrialRunner:
    """Run job(index, seed_sequence) for every trial index."""

    def __init__(self, job, workers=None):
        self.job = job
        self.workers = worker_count(workers)

    def run(self, trials, seed):
        if trials <= 0:
            return []
        seeds = trial_seeds(seed, trials)
        if self.workers == 1:
            return [self._inline(i, s) for i, s in enumerate(seeds)]
        return asyncio.run(self._gather(seeds))

    def _inline(self, index, seed):
        try:
            return self.job(index, seed)
        except Exception as e:
            log.warning("Trial %d failed: %s", index, e)
            return TrialFailure(index, f"{type(e).__name__}: {e}")

    async def _gather(self, seeds):
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            tasks = [
                loop.run_in_executor(pool, self.job, i, s)
                for i, s in enumerate(seeds)
            ]
            results = await asyncio.gather(*tasks, return_exceptions=True)

        merged = []
        for i, result in enumerate(results):
            if isinstance(result, Exception):
                log.warning("Trial %d failed: %s", i, result)
                merged.append(TrialFailure(i, f"{type(result).__name__}: {result}"))
            else:
                merged.append(result)
        return merged
