"""
Sweep runner module for the complements revenue lab.

This module runs one check per instance over a batch of instances on
background worker threads and merges the per-instance records into a
deterministic result set. Each worker pulls the next task from a shared
queue, so the output never depends on which worker ran what.
"""

import logging
import math
import queue
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from .config import SWEEP_WORKERS
from .errors import CapacityError
from .model import HypergraphPrior
from .reporting import CHECK_NAMES, FAIL, NOT_FALSIFIABLE, PASS, SKIPPED, build_record, format_value

logger = logging.getLogger(__name__)

ERROR = "error"

AGGREGATE_COLUMNS = (
    "check",
    "n_checked",
    "n_failed",
    "n_not_falsifiable",
    "n_skipped",
    "min_slack",
    "median_slack",
    "max_slack",
)


@dataclass(frozen=True)
class SweepTask:
    instance_id: str
    seed: int
    prior: HypergraphPrior
    instance_hash: str = ""
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class SweepResult:
    instance_id: str
    status: str
    row: Dict[str, str]
    error: str = ""


CheckFn = Callable[[SweepTask], Dict[str, str]]


class SweepRunner:
    """
    Runs a check function over many instances with background worker threads.

    This class is responsible for:
    - Fanning tasks out to a fixed pool of daemon worker threads
    - Recording each instance's CSV row, or its error, without aborting the batch
    - Providing clean start/stop functionality and a progress callback
    - Thread-safe state management

    A CapacityError marks the instance "skipped"; any other exception marks it
    "error". Results are keyed by instance id and returned sorted by it.
    """

    def __init__(
        self,
        check_fn: CheckFn,
        config_hash: str = "",
        workers: int = SWEEP_WORKERS,
        progress_callback: Optional[Callable[[int, int], None]] = None,
    ) -> None:
        """
        Initialize the sweep runner.

        Args:
            check_fn: Turns one task into its CSV row; may raise
            config_hash: Recorded on rows of instances that raised
            workers: Number of worker threads
            progress_callback: Called with (finished, total) after each instance
        """
        if check_fn is None:
            raise ValueError("check_fn must not be None")
        self.check_fn: CheckFn = check_fn
        self.config_hash = config_hash
        self.workers = max(1, int(workers))
        self.is_active: bool = False
        self.threads: List[threading.Thread] = []
        self._state_lock = threading.Lock()
        self._stop_event = threading.Event()
        self._tasks: "queue.Queue[SweepTask]" = queue.Queue()
        self._results: Dict[str, SweepResult] = {}
        self._total = 0
        self._progress_callback = progress_callback
        logger.debug("SweepRunner initialized with %d workers", self.workers)

    def start(self, tasks: Sequence[SweepTask]) -> None:
        """
        Queue the tasks and start the worker threads; returns immediately.

        Raises:
            RuntimeError: If a sweep is already running
            ValueError: If two tasks share an instance id
        """
        ids = [t.instance_id for t in tasks]
        if len(set(ids)) != len(ids):
            raise ValueError("instance ids in a sweep must be unique")
        with self._state_lock:
            if self.is_active:
                raise RuntimeError("Sweep is already running")
            self.is_active = True
            self._stop_event.clear()
            self._results = {}
            self._total = len(tasks)
            self._tasks = queue.Queue()
            for task in tasks:
                self._tasks.put(task)

        self.threads = [
            threading.Thread(target=self._worker_loop, name=f"SweepWorker-{n}", daemon=True)
            for n in range(min(self.workers, max(1, len(tasks))))
        ]
        try:
            for thread in self.threads:
                thread.start()
            logger.debug("Sweep started: %d instances", len(tasks))
        except Exception:
            with self._state_lock:
                self.is_active = False
            self._stop_event.set()
            self.threads = []
            logger.exception("Failed to start sweep worker threads")
            raise

    def wait(self, timeout: Optional[float] = None) -> bool:
        """Block until every worker has exited; False if the timeout ran out first."""
        for thread in list(self.threads):
            thread.join(timeout=timeout)
            if thread.is_alive():
                return False
        with self._state_lock:
            self.is_active = False
        return True

    def stop(self, timeout: float = 5.0) -> None:
        """Ask the workers to stop after their current instance and wait for them."""
        with self._state_lock:
            if not self.is_active:
                return
            self._stop_event.set()
        for thread in self.threads:
            thread.join(timeout=timeout)
            if thread.is_alive():
                logger.warning("Sweep worker %s did not exit within %.1fs", thread.name, timeout)
        with self._state_lock:
            self.is_active = False
        logger.debug("Sweep stopped with %d of %d instances done", len(self._results), self._total)

    def run(self, tasks: Sequence[SweepTask]) -> List[SweepResult]:
        self.start(tasks)
        self.wait()
        return self.results()

    def results(self) -> List[SweepResult]:
        with self._state_lock:
            return [self._results[k] for k in sorted(self._results)]

    def _worker_loop(self) -> None:
        while not self._stop_event.is_set():
            try:
                task = self._tasks.get_nowait()
            except queue.Empty:
                break
            result = self._run_one(task)
            with self._state_lock:
                self._results[task.instance_id] = result
                done = len(self._results)
            self._notify_progress(done)

    def _run_one(self, task: SweepTask) -> SweepResult:
        try:
            row = self.check_fn(task)
            return SweepResult(task.instance_id, row.get("status", PASS), row)
        except CapacityError as exc:
            status, message = SKIPPED, str(exc)
        except Exception as exc:
            logger.debug("Instance %s raised %r", task.instance_id, exc)
            status, message = ERROR, f"{type(exc).__name__}: {exc}"
        row = build_record(task.instance_id, task.instance_hash, task.seed, self.config_hash, {}, [], message, status)
        return SweepResult(task.instance_id, status, row, message)

    def _notify_progress(self, done: int) -> None:
        callback = self._progress_callback
        if callback is None:
            return
        try:
            callback(done, self._total)
        except Exception:
            pass

    def get_status(self) -> dict:
        """
        Get current sweep status information.

        Returns:
            dict: Active flag, worker liveness and per-status instance counts
        """
        with self._state_lock:
            counts: Dict[str, int] = {}
            for result in self._results.values():
                counts[result.status] = counts.get(result.status, 0) + 1
            return {
                "is_active": self.is_active,
                "workers_alive": sum(t.is_alive() for t in self.threads),
                "total": self._total,
                "done": len(self._results),
                "by_status": counts,
            }


def aggregate_rows(rows: Sequence[Mapping[str, str]]) -> List[Dict[str, str]]:
    """
    Per-check summary of instance rows.

    Checked instances are those with a pass, fail or not_falsifiable status;
    everything else counts as skipped. No rows means no summary lines.
    """
    if not rows:
        return []
    out = []
    for name in CHECK_NAMES:
        statuses = [r.get(f"{name}_status", "") for r in rows]
        slacks = [
            float(r[f"{name}_slack"])
            for r, s in zip(rows, statuses)
            if s in (PASS, FAIL, NOT_FALSIFIABLE) and r.get(f"{name}_slack", "") != ""
        ]
        finite = [s for s in slacks if not math.isnan(s)]
        checked = sum(s in (PASS, FAIL, NOT_FALSIFIABLE) for s in statuses)
        out.append(
            {
                "check": name,
                "n_checked": str(checked),
                "n_failed": str(statuses.count(FAIL)),
                "n_not_falsifiable": str(statuses.count(NOT_FALSIFIABLE)),
                "n_skipped": str(len(rows) - checked),
                "min_slack": format_value(min(finite)) if finite else "",
                "median_slack": format_value(float(np.median(finite))) if finite else "",
                "max_slack": format_value(max(finite)) if finite else "",
            }
        )
    return out


def summarize(results: Sequence[SweepResult]) -> Dict[str, int]:
    """
    Instance counts per status plus the total.

    "not_falsifiable" counts instances with at least one soft check that did
    not hold; such an instance still has status pass.
    """
    counts = {PASS: 0, FAIL: 0, SKIPPED: 0, ERROR: 0, NOT_FALSIFIABLE: 0}
    for result in results:
        counts[result.status] = counts.get(result.status, 0) + 1
        if any(result.row.get(f"{name}_status") == NOT_FALSIFIABLE for name in CHECK_NAMES):
            counts[NOT_FALSIFIABLE] += 1
    counts["total"] = len(results)
    return counts
