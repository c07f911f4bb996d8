"""Deterministic task fan-out over a worker pool.

TaskRunner maps a function over a lazy task sequence with a bounded number
of tasks in flight.  Results come back in task order regardless of which
worker finishes first, so reductions layered on top see one fixed order and
produce identical results for every worker count.  A failing task raises at
its position in the sequence, exactly as sequential execution would.

With workers == 1 everything runs inline in the calling process.  Process
pools use the fork start method: heavy read-only state is passed once
through ``init``/``initargs`` and inherited by the children, while per-task
arguments and results must stay small and picklable.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, ThreadPoolExecutor, wait


class TaskRunner:
    def __init__(self, workers: int, *, init=None, initargs=(), kind: str = "process"):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.workers = workers
        self._executor = None
        if workers == 1 or kind == "inline":
            if init is not None:
                init(*initargs)
        elif kind == "process":
            self._executor = ProcessPoolExecutor(
                max_workers=workers,
                mp_context=multiprocessing.get_context("fork"),
                initializer=init,
                initargs=initargs,
            )
        elif kind == "thread":
            self._executor = ThreadPoolExecutor(
                max_workers=workers, initializer=init, initargs=initargs
            )
        else:
            raise ValueError(f"unknown pool kind {kind!r}")

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def map(self, fn, tasks, *, max_pending: int | None = None, ordered: bool = True):
        """Yield fn(task) for each task; at most max_pending tasks in flight.

        ``ordered`` yields results in task order (the default); switching it
        off yields in completion order, which is faster to drain but not
        reproducible across runs.
        """
        if self._executor is None:
            for task in tasks:
                yield fn(task)
            return
        yield from self._map_pool(fn, tasks, max_pending or self.workers + 2, ordered)

    def _map_pool(self, fn, tasks, limit, ordered):
        task_iter = enumerate(iter(tasks))
        futures = {}
        results = {}
        next_out = 0

        def submit_one():
            for ordinal, task in task_iter:
                futures[self._executor.submit(fn, task)] = ordinal
                return True
            return False

        for _ in range(limit):
            if not submit_one():
                break
        while futures or results:
            if futures:
                done, _ = wait(set(futures), return_when=FIRST_COMPLETED)
                for fut in done:
                    ordinal = futures.pop(fut)
                    try:
                        results[ordinal] = (True, fut.result())
                    except BaseException as e:  # re-raised at the task's position
                        results[ordinal] = (False, e)
                    submit_one()
            if ordered:
                while next_out in results:
                    ok, value = results.pop(next_out)
                    next_out += 1
                    if not ok:
                        raise value
                    yield value
            else:
                for ordinal in sorted(results):
                    ok, value = results.pop(ordinal)
                    if not ok:
                        raise value
                    yield value
