"""
Unit tests for the SweepRunner module.

Validates:
- Results come back sorted by instance id whatever the worker count
- Capacity errors mark an instance skipped and other errors mark it error
- Duplicate ids, double starts, stop and progress reporting
- Per-check aggregation and status summaries
"""

import threading
import unittest

from src.errors import CapacityError
from src.model import HypergraphPrior
from src.reporting import FAIL, NOT_FALSIFIABLE, PASS, SKIPPED, InequalityCheck, build_record
from src.sweep_runner import ERROR, SweepResult, SweepRunner, SweepTask, aggregate_rows, summarize

PRIOR = HypergraphPrior.create(1, [((0,), {0.0: 0.5, 1.0: 0.5})])


def make_tasks(count: int):
    return [SweepTask(f"inst-{n:03d}", n, PRIOR) for n in range(count)]


def passing_row(task: SweepTask):
    check = InequalityCheck.evaluate("main_bound", 1.0, 1.0 + task.seed, 1e-9)
    return build_record(task.instance_id, task.instance_hash, task.seed, "cfg", {"m": 1}, [check])


class TestSweepRunner(unittest.TestCase):
    """Tests for SweepRunner."""

    def test_results_sorted_by_id(self) -> None:
        """Four workers over twelve instances give one sorted result each."""
        tasks = make_tasks(12)
        results = SweepRunner(passing_row, "cfg", workers=4).run(list(reversed(tasks)))
        self.assertEqual([r.instance_id for r in results], [t.instance_id for t in tasks])
        self.assertTrue(all(r.status == PASS for r in results))
        self.assertEqual(results[3].row["main_bound_slack"], "3.0")

    def test_capacity_error_is_skipped(self) -> None:
        """An over-capacity instance is skipped and the batch goes on."""

        def check(task: SweepTask):
            if task.seed == 1:
                raise CapacityError("too many profiles", cap_name="max_profiles")
            return passing_row(task)

        results = SweepRunner(check, "cfg", workers=2).run(make_tasks(3))
        self.assertEqual([r.status for r in results], [PASS, SKIPPED, PASS])
        self.assertEqual(results[1].row["status"], SKIPPED)
        self.assertIn("too many profiles", results[1].row["error"])
        self.assertEqual(results[1].row["config_hash"], "cfg")

    def test_other_exception_is_error(self) -> None:
        """Unexpected exceptions are recorded with their type."""

        def check(task: SweepTask):
            raise ZeroDivisionError("boom")

        results = SweepRunner(check, workers=1).run(make_tasks(2))
        self.assertEqual([r.status for r in results], [ERROR, ERROR])
        self.assertEqual(results[0].error, "ZeroDivisionError: boom")

    def test_duplicate_ids_rejected(self) -> None:
        """Instance ids must be unique."""
        runner = SweepRunner(passing_row)
        with self.assertRaises(ValueError):
            runner.start([SweepTask("a", 0, PRIOR), SweepTask("a", 1, PRIOR)])
        self.assertFalse(runner.is_active)

    def test_none_check_fn_rejected(self) -> None:
        """A runner needs something to run."""
        with self.assertRaises(ValueError):
            SweepRunner(None)

    def test_empty_sweep(self) -> None:
        """No tasks, no results."""
        self.assertEqual(SweepRunner(passing_row).run([]), [])

    def test_progress_callback(self) -> None:
        """One call per finished instance; a failing callback is ignored."""
        calls = []

        def progress(done: int, total: int) -> None:
            calls.append((done, total))
            raise RuntimeError("ignored")

        results = SweepRunner(passing_row, workers=1, progress_callback=progress).run(make_tasks(3))
        self.assertEqual(len(results), 3)
        self.assertEqual(calls, [(1, 3), (2, 3), (3, 3)])

    def test_double_start_raises(self) -> None:
        """A running sweep cannot be started again."""
        gate = threading.Event()

        def check(task: SweepTask):
            gate.wait(timeout=5.0)
            return passing_row(task)

        runner = SweepRunner(check, workers=1)
        runner.start(make_tasks(1))
        try:
            with self.assertRaises(RuntimeError):
                runner.start(make_tasks(1))
        finally:
            gate.set()
            runner.wait()
        self.assertFalse(runner.is_active)

    def test_stop_after_current_instance(self) -> None:
        """stop lets the current instance finish and leaves the rest."""
        started, gate = threading.Event(), threading.Event()

        def check(task: SweepTask):
            started.set()
            gate.wait(timeout=5.0)
            return passing_row(task)

        runner = SweepRunner(check, workers=1)
        runner.start(make_tasks(3))
        self.assertTrue(started.wait(timeout=5.0))
        releaser = threading.Timer(0.2, gate.set)
        releaser.start()
        runner.stop(timeout=5.0)
        releaser.join()
        status = runner.get_status()
        self.assertFalse(status["is_active"])
        self.assertEqual(status["done"], 1)
        self.assertEqual(status["total"], 3)
        self.assertEqual(status["by_status"], {PASS: 1})

    def test_stop_when_idle(self) -> None:
        """Stopping a runner that never started is harmless."""
        runner = SweepRunner(passing_row)
        runner.stop()
        self.assertFalse(runner.get_status()["is_active"])


class TestAggregation(unittest.TestCase):
    """Tests for aggregate_rows and summarize."""

    def test_aggregate_slacks(self) -> None:
        """Checked rows give slack statistics; error rows count as skipped."""
        rows = [passing_row(t) for t in make_tasks(3)]
        failing = InequalityCheck.evaluate("main_bound", 5.0, 1.0, 1e-9)
        rows.append(build_record("inst-fail", "", 9, "cfg", {}, [failing]))
        rows.append(build_record("inst-err", "", 10, "cfg", {}, [], "boom", ERROR))
        summary = {line["check"]: line for line in aggregate_rows(rows)}
        main = summary["main_bound"]
        self.assertEqual(main["n_checked"], "4")
        self.assertEqual(main["n_failed"], "1")
        self.assertEqual(main["n_skipped"], "1")
        self.assertEqual(main["min_slack"], "-4.0")
        self.assertEqual(main["median_slack"], "0.5")
        self.assertEqual(main["max_slack"], "2.0")
        self.assertEqual(summary["tail_bound"]["n_checked"], "0")
        self.assertEqual(summary["tail_bound"]["min_slack"], "")

    def test_aggregate_empty(self) -> None:
        """No rows, no summary lines."""
        self.assertEqual(aggregate_rows([]), [])

    def test_summarize(self) -> None:
        """Counts per status, instances with a soft violation, and the total."""
        results = [
            SweepResult("a", PASS, {}),
            SweepResult("b", FAIL, {}),
            SweepResult("c", SKIPPED, {}),
            SweepResult("d", PASS, {"single_degree_bound_status": NOT_FALSIFIABLE}),
        ]
        expected = {PASS: 2, FAIL: 1, SKIPPED: 1, ERROR: 0, NOT_FALSIFIABLE: 1, "total": 4}
        self.assertEqual(summarize(results), expected)


if __name__ == "__main__":
    unittest.main()
