"""
Main application controller for the complements revenue lab.

This module is the command-line entry point::

    python -m src.main gen {lb,regular,ph,ps,random} [params] [--out PATH]
    python -m src.main check --instance PATH [--mode exact|mc:N] [--out DIR]
    python -m src.main sweep random --count N [--seed S] [--out DIR]

The application class is responsible for:
- Turning flags into a RunConfig
- Dispatching to instance generation, chain checking or sweeps
- Mapping library errors to exit codes
- Stopping a running sweep cleanly on Ctrl+C

Exit codes: 0 every check passed, 1 some check failed, 2 usage, 3 parse,
4 capacity, 5 solver, 130 interrupted.
"""

import argparse
import logging
import os
import signal
import sys
import threading
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence

from .config import (
    CONSOLE_OUTPUT_ENABLED,
    DEFAULT_CUTOFF_K,
    DEFAULT_GRID_DENSITY,
    DEFAULT_LB_OFFSET,
    DEFAULT_Q,
    DEFAULT_SEED,
    MAX_LP_VARIABLES,
    MAX_PROFILES,
    SWEEP_WORKERS,
    RunConfig,
    default_out_dir,
)
from .duality import check_chain
from .errors import CapacityError, InstanceFormatError, LabError, SolverError
from .instance_io import dump_instance, instance_hash, load_instance, parse_edge_list
from .lowerbounds import gen_lb_instance, gen_ph_k, gen_ps_k, gen_regular_graph, instance_from_meta, verify_lb
from .model import HypergraphPrior
from .random_priors import DEFAULT_M, DEFAULT_MAX_EDGES, DEFAULT_MAX_SUPPORT, DEFAULT_MAX_VALUE, random_prior
from .reporting import CHECK_NAMES, FAIL, InequalityCheck, build_record, csv_text, json_text, overall_status, write_text
from .sweep_runner import AGGREGATE_COLUMNS, SweepRunner, SweepTask, aggregate_rows, summarize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CAPACITY = 4
EXIT_SOLVER = 5
EXIT_INTERRUPTED = 130

GEN_KINDS = ("lb", "regular", "ph", "ps", "random")
SWEEP_KINDS = ("random",)


@dataclass
class InstanceCheck:
    """Everything one `check` produces: the flat CSV row and the full JSON report."""

    row: Dict[str, str]
    report: Dict[str, Any]

    @property
    def status(self) -> str:
        return self.row["status"]


def _config_dict(config: RunConfig) -> Dict[str, Any]:
    data = asdict(config)
    data.pop("out_dir", None)
    data.pop("record_timings", None)
    return data


def check_instance(
    prior: HypergraphPrior,
    meta: Mapping[str, Any],
    config: RunConfig,
    instance_id: str,
    seed: Optional[int] = None,
) -> InstanceCheck:
    """
    Run the inequality chain, plus the lower-bound checks when the metadata has them.

    A lower-bound instance too large for the chain still gets its lower-bound
    checks; the chain checks are then recorded as skipped.

    Raises:
        CapacityError: If a plain instance is too large for the chain
        InstanceFormatError: If the lower-bound metadata does not match the prior
    """
    seed = config.seed if seed is None else seed
    lb = instance_from_meta(prior, meta)
    scalars: Dict[str, Any] = {}
    checks: List[InequalityCheck] = []
    report: Dict[str, Any] = {}
    try:
        chain = check_chain(prior, config)
        scalars.update(chain.scalars())
        checks.extend(chain.checks)
        report["chain"] = chain.to_dict()
    except CapacityError as exc:
        if lb is None:
            raise
        note = f"chain skipped: {exc}"
        checks.extend(InequalityCheck.skipped(name, note) for name in CHECK_NAMES if not name.startswith("lb_"))
        report["chain"] = {"skipped": str(exc)}
    if lb is not None:
        lb_report = verify_lb(lb, config=config)
        for key, value in lb_report.scalars().items():
            scalars.setdefault(key, value)
        checks.extend(lb_report.checks)
        report["lower_bound"] = lb_report.to_dict()

    digest = instance_hash(prior, meta)
    row = build_record(instance_id, digest, seed, config.config_hash(), scalars, checks)
    report.update(
        instance_id=instance_id,
        instance_hash=digest,
        seed=seed,
        config_hash=config.config_hash(),
        config=_config_dict(config),
        status=overall_status(checks),
    )
    return InstanceCheck(row, report)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Raises:
        ConfigError: If a flag value is out of range
    """
    return RunConfig.from_mode_string(
        args.mode,
        seed=args.seed,
        q=args.q,
        cutoff_k=args.k,
        grid_density=args.grid_density,
        max_profiles=args.cap_profiles,
        max_lp_variables=args.cap_lp_vars,
        out_dir=args.out or "",
        record_timings=args.timings,
    )


def _generated(args: argparse.Namespace):
    """(prior, meta, file stem) for a `gen` invocation."""
    if args.kind == "random":
        m = args.m if args.m is not None else DEFAULT_M
        params = {
            "seed": args.seed,
            "m": m,
            "max_edges": args.max_edges,
            "max_support": args.max_support,
            "max_value": args.max_value,
        }
        prior = random_prior(args.seed, m, args.max_edges, args.max_support, args.max_value)
        return prior, {"kind": "random", "params": params}, f"random-m{m}-s{args.seed}"
    if args.kind == "lb":
        edges = parse_edge_list(args.edges or "")
        instance = gen_lb_instance(edges, args.a, args.m, "lb", {"edges": [list(e) for e in edges]})
        return instance.prior, instance.meta(), f"lb-e{len(edges)}-a{args.a}"
    if args.m is None:
        raise argparse.ArgumentTypeError(f"gen {args.kind} needs --m")
    if args.kind == "regular":
        if args.d is None:
            raise argparse.ArgumentTypeError("gen regular needs --d")
        edges, param = gen_regular_graph(args.m, args.d), {"m": args.m, "d": args.d}
        stem = f"regular-m{args.m}-d{args.d}"
    else:
        if args.k is None:
            raise argparse.ArgumentTypeError(f"gen {args.kind} needs --k")
        make = gen_ph_k if args.kind == "ph" else gen_ps_k
        edges, param = make(args.m, args.k), {"m": args.m, "k": args.k}
        stem = f"{args.kind}-m{args.m}-k{args.k}"
    instance = gen_lb_instance(edges, args.a, args.m, args.kind, param)
    return instance.prior, instance.meta(), f"{stem}-a{args.a}"


def cmd_gen(args: argparse.Namespace) -> int:
    prior, meta, stem = _generated(args)
    path = args.out or os.path.join(default_out_dir(), f"{stem}.json")
    dump_instance(prior, path, meta)
    print(path)
    return EXIT_OK


def _report_paths(out_dir: str, stem: str):
    return os.path.join(out_dir, f"{stem}.report.json"), os.path.join(out_dir, f"{stem}.report.csv")


def cmd_check(args: argparse.Namespace, config: RunConfig) -> int:
    prior, meta = load_instance(args.instance)
    stem = os.path.splitext(os.path.basename(args.instance))[0]
    result = check_instance(prior, meta, config, stem)
    json_path, csv_path = _report_paths(config.resolved_out_dir(), stem)
    write_text(json_path, json_text(result.report))
    write_text(csv_path, csv_text([result.row]))
    failed = [name for name in CHECK_NAMES if result.row.get(f"{name}_status") == FAIL]
    print(f"{stem}: {result.status}" + (f" (failed: {', '.join(failed)})" if failed else ""))
    print(json_path)
    return EXIT_CHECK_FAILED if result.status == FAIL else EXIT_OK


def sweep_tasks(args: argparse.Namespace) -> List[SweepTask]:
    m = args.m if args.m is not None else DEFAULT_M
    tasks = []
    for i in range(args.count):
        seed = args.seed + i
        prior = random_prior(seed, m, args.max_edges, args.max_support, args.max_value)
        meta = {"kind": "random", "params": {"seed": seed, "m": m}}
        tasks.append(SweepTask(f"{args.kind}-{i:05d}", seed, prior, instance_hash(prior, meta), meta))
    return tasks


class LabApp:
    """
    Application controller for one command-line invocation.

    This class owns the run's lifecycle: it dispatches the subcommand,
    translates errors to exit codes and, on Ctrl+C, stops any running sweep
    before exiting with 130.
    """

    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.sweep_runner: Optional[SweepRunner] = None
        self.running: bool = True
        self.exit_code: Optional[int] = None

    def run(self) -> int:
        previous = None
        try:
            if threading.current_thread() is threading.main_thread():
                previous = signal.signal(signal.SIGINT, self._signal_handler)
            code = self._dispatch()
        except KeyboardInterrupt:
            self.cleanup()
            print("interrupted", file=sys.stderr)
            code = EXIT_INTERRUPTED
        except InstanceFormatError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            code = EXIT_PARSE
        except CapacityError as exc:
            print(f"capacity error: {exc}", file=sys.stderr)
            code = EXIT_CAPACITY
        except SolverError as exc:
            print(f"solver error: {exc} {exc.diagnostics}", file=sys.stderr)
            code = EXIT_SOLVER
        except (LabError, argparse.ArgumentTypeError) as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            code = EXIT_USAGE
        finally:
            self.running = False
            if previous is not None:
                signal.signal(signal.SIGINT, previous)
        self.exit_code = code
        return code

    def _dispatch(self) -> int:
        if self.args.command == "gen":
            return cmd_gen(self.args)
        config = config_from_args(self.args)
        if self.args.command == "check":
            return cmd_check(self.args, config)
        return self.run_sweep(config)

    def run_sweep(self, config: RunConfig) -> int:
        args = self.args
        tasks = sweep_tasks(args)

        def check_fn(task: SweepTask) -> Dict[str, str]:
            return check_instance(task.prior, task.meta, config, task.instance_id, task.seed).row

        def progress(done: int, total: int) -> None:
            logger.debug("Sweep progress %d/%d", done, total)

        self.sweep_runner = SweepRunner(check_fn, config.config_hash(), args.workers, progress)
        results = self.sweep_runner.run(tasks)
        rows = [r.row for r in results]
        out_dir = config.resolved_out_dir()
        stem = f"sweep-{args.kind}"
        write_text(os.path.join(out_dir, f"{stem}.csv"), csv_text(rows))
        aggregate_path = os.path.join(out_dir, f"{stem}.aggregate.csv")
        write_text(aggregate_path, csv_text(aggregate_rows(rows), AGGREGATE_COLUMNS))
        counts = summarize(results)
        print(
            f"{counts['total']} instances: {counts['pass']} pass, {counts['fail']} fail, "
            f"{counts['skipped']} skipped, {counts['error']} error; "
            f"{counts['not_falsifiable']} with a not-falsifiable check"
        )
        print(aggregate_path)
        return EXIT_CHECK_FAILED if counts["fail"] or counts["error"] else EXIT_OK

    def cleanup(self) -> None:
        """Stop a running sweep; safe to call more than once."""
        logger.debug("cleanup() called")
        runner = self.sweep_runner
        if runner is not None:
            try:
                runner.stop()
            except Exception as exc:
                logger.debug("Error stopping sweep: %s", exc)
        self.running = False

    def _signal_handler(self, signum, frame) -> None:
        """
        Handle Ctrl+C: stop the sweep and unwind to run().

        Args:
            signum: Signal number
            frame: Current stack frame
        """
        self.cleanup()
        raise KeyboardInterrupt

    def get_status(self) -> dict:
        return {
            "command": getattr(self.args, "command", None),
            "running": self.running,
            "exit_code": self.exit_code,
            "sweep": self.sweep_runner.get_status() if self.sweep_runner else None,
        }


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--out", help="output directory (default $CAL_LAB_OUT_DIR or ./reports)")
    parser.add_argument("--q", type=float, default=DEFAULT_Q, help="sale-probability budget of the copies pricing")
    parser.add_argument("--k", type=float, default=DEFAULT_CUTOFF_K, help="expected tail count of the cutoff")
    parser.add_argument("--grid-density", type=int, default=DEFAULT_GRID_DENSITY)
    parser.add_argument("--mode", default="exact", help="exact or mc:N")
    parser.add_argument("--cap-profiles", type=int, default=MAX_PROFILES)
    parser.add_argument("--cap-lp-vars", type=int, default=MAX_LP_VARIABLES)
    parser.add_argument("--timings", action="store_true", help="record stage timings in the JSON report")


def _add_random_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, default=None)
    parser.add_argument("--max-edges", type=int, default=DEFAULT_MAX_EDGES)
    parser.add_argument("--max-support", type=int, default=DEFAULT_MAX_SUPPORT)
    parser.add_argument("--max-value", type=int, default=DEFAULT_MAX_VALUE)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m src.main", description="Revenue benchmarks under complements")
    parser.add_argument("--verbose", action="store_true", help="DEBUG logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write an instance file")
    gen.add_argument("kind", choices=GEN_KINDS)
    _add_random_flags(gen)
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--d", type=int, default=None, help="degree for regular graphs")
    gen.add_argument("--k", type=int, default=None, help="edge size bound (ph) or block size minus one (ps)")
    gen.add_argument("--a", type=int, default=DEFAULT_LB_OFFSET, help="edge index offset of lower-bound weights")
    gen.add_argument("--edges", default=None, help='edge list such as "{0};{0,1}"')
    gen.add_argument("--out", default=None, help="instance file path")

    check = sub.add_parser("check", help="check the inequality chain on one instance")
    check.add_argument("--instance", required=True)
    _add_config_flags(check)

    sweep = sub.add_parser("sweep", help="check many seeded instances")
    sweep.add_argument("kind", choices=SWEEP_KINDS)
    sweep.add_argument("--count", type=int, required=True)
    sweep.add_argument("--workers", type=int, default=SWEEP_WORKERS)
    _add_config_flags(sweep)
    _add_random_flags(sweep)
    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose or CONSOLE_OUTPUT_ENABLED else logging.WARNING
    logging.basicConfig(level=level, format="[%(levelname)s] %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "count", 0) < 0:
        print("usage error: --count must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(args.verbose)
    return LabApp(args).run()


if __name__ == "__main__":
    sys.exit(main())
