"""Command-line entry point: ``mcfpga {price,bench,analyze,partition}``.

Exit codes: 0 success, 2 usage or configuration error, 3 infeasible plan,
4 data parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import devicelab, engine, metrics, tasks
from .errors import (
    ConfigurationError,
    DataParseError,
    EmptyDataError,
    InfeasibleWorkloadError,
    InvalidObservationError,
    PlanIntegrityError,
    UnprofileableTaskError,
)

DEFAULT_SEED = 42
DESK_PATHS = 100_000
DESK_STEPS = 512
FULL_PATHS = 10_000_000
FULL_STEPS = 4096

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_PARSE = 0, 2, 3, 4

BENCH_FIELDS = ("task", "strategy", "repetition", "seed", "paths", "steps", "price", "stderr", "latency_s", "flops")


def _strategy(text):
    try:
        return engine.ExecutionStrategy.parse(text)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _costs(args):
    return metrics.load_cost_table(args.costs) if args.costs else metrics.OpCostTable()


def _sized(task, args):
    if args.paper_scale:
        paths, steps = FULL_PATHS, FULL_STEPS
    else:
        paths, steps = DESK_PATHS, DESK_STEPS
    if args.paths is not None:
        paths = args.paths
    if args.steps is not None:
        steps = args.steps
    return task.with_size(paths=paths, steps=steps)


def _result_record(task, result, timing=True):
    rec = {"task": task.designation, "steps": task.steps}
    rec.update(result.as_dict())
    if not timing:
        rec["latency"] = None
    return rec


def cmd_price(args, out):
    task = _sized(tasks.resolve_task(args.task, args.task_file), args)
    trace = metrics.load_power_trace(args.power_trace) if args.power_trace else None
    result = engine.run(task, args.strategy, args.seed, power_trace=trace, costs=_costs(args))
    rec = _result_record(task, result, not args.no_timing)
    if args.format == "json":
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    elif args.format == "csv":
        writer = csv.DictWriter(out, fieldnames=list(rec), lineterminator="\n")
        writer.writeheader()
        writer.writerow(rec)
    else:
        out.write(f"task      {task.designation}\n")
        out.write(f"strategy  {result.strategy.label()}\n")
        out.write(f"seed      {result.seed}\n")
        out.write(f"paths     {task.paths}\n")
        out.write(f"steps     {task.steps}\n")
        out.write(f"price     {result.price!r}\n")
        out.write(f"stderr    {result.stderr!r}\n")
        if not args.no_timing:
            out.write(f"latency   {result.latency:.6f} s\n")
        out.write(f"flops     {result.flops}\n")
        if result.energy is not None:
            out.write(f"energy    {result.energy:.6g} J\n")
            out.write(f"FLOP/J    {metrics.efficiency(result.flops, result.energy):.6g}\n")
    return EXIT_OK


def cmd_bench(args, out):
    names = args.task or list(tasks.BENCHMARK_TASKS)
    strategies = args.strategy or [engine.ExecutionStrategy.parse(s) for s in ("baseline", "tp:4", "pp:4")]
    catalogue = tasks.load_tasks(args.task_file)
    costs = _costs(args)
    records = []
    for name in names:
        task = _sized(tasks.resolve_task(name, tasks=catalogue), args)
        for strategy in strategies:
            for rep in range(args.repetitions):
                r = engine.run(task, strategy, args.seed, costs=costs)
                records.append(
                    {
                        "task": name,
                        "strategy": strategy.label(),
                        "repetition": rep,
                        "seed": args.seed,
                        "paths": task.paths,
                        "steps": task.steps,
                        "price": repr(r.price),
                        "stderr": repr(r.stderr),
                        "latency_s": "" if args.no_timing else f"{r.latency:.6f}",
                        "flops": r.flops,
                    }
                )
    if args.format == "json":
        out.write(json.dumps(records, indent=2) + "\n")
    elif args.format == "text":
        for rec in records:
            out.write(
                f"{rec['task']:<14} {rec['strategy']:<14} #{rec['repetition']} "
                f"price {rec['price']:<22} stderr {rec['stderr']:<22} {rec['latency_s']} s\n"
            )
    else:
        writer = csv.DictWriter(out, fieldnames=BENCH_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
    return EXIT_OK


def _table(args):
    return devicelab.load_measurements(
        args.data_dir, platforms=args.platforms, latency=args.latency, energy=args.energy
    )


def cmd_analyze(args, out):
    table = _table(args)
    rep = devicelab.report(table, _costs(args), tasks.load_tasks(args.task_file))
    if args.format == "json":
        out.write(rep.to_json())
    elif args.format == "csv":
        out.write(rep.to_csv())
    else:
        out.write(rep.to_text())
    return EXIT_OK


def cmd_partition(args, out):
    table = _table(args)
    workload = devicelab.load_workload(args.workload, tasks.load_tasks(args.task_file))
    if args.objective:
        workload = devicelab.WorkloadSpec(
            workload.tasks, args.objective, workload.max_joules, workload.max_seconds, workload.devices, workload.split
        )
    plan = devicelab.plan_partition(workload, table, _costs(args))
    if args.format == "json":
        out.write(json.dumps(plan.as_dict(), indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("task", "platform", "variant", "paths", "uses_fpga", "makespan_s", "energy_j"))
        for d in plan.decisions:
            for a in d.allocations:
                writer.writerow((d.task, a.platform, a.variant, a.paths, d.uses_fpga, repr(d.makespan), repr(d.energy)))
        out.write(buf.getvalue())
    else:
        out.write(plan.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcfpga", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), help="default: csv for bench, text otherwise")
    common.add_argument("--task-file", help="task definitions (default: bundled)")
    common.add_argument("--costs", help="FLOP cost table, name=weight lines")

    sizing = argparse.ArgumentParser(add_help=False)
    sizing.add_argument("--paths", type=int, help=f"simulation paths (default {DESK_PATHS})")
    sizing.add_argument("--steps", type=int, help=f"path points (default {DESK_STEPS})")
    sizing.add_argument("--full-scale", "--paper-scale", dest="paper_scale", action="store_true", help=f"{FULL_PATHS} paths x {FULL_STEPS} steps")
    sizing.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sizing.add_argument("--no-timing", action="store_true", help="omit latency for byte-stable output")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data-dir", help="directory with platforms/latency/energy CSVs (default: bundled)")
    data.add_argument("--platforms")
    data.add_argument("--latency")
    data.add_argument("--energy")

    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("price", parents=[common, sizing], help="price one task")
    p.add_argument("--task", required=True)
    p.add_argument("--strategy", type=_strategy, default=engine.ExecutionStrategy())
    p.add_argument("--power-trace", help="t_seconds,watts samples to integrate")
    p.set_defaults(func=cmd_price)

    b = sub.add_parser("bench", parents=[common, sizing], help="benchmark tasks across strategies")
    b.add_argument("--task", action="append", help="repeatable; default: the five measured tasks")
    b.add_argument("--strategy", action="append", type=_strategy, help="repeatable; default baseline, tp:4, pp:4")
    b.add_argument("--repetitions", type=int, default=1)
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("analyze", parents=[common, data], help="platform comparison from measured tables")
    a.set_defaults(func=cmd_analyze)

    w = sub.add_parser("partition", parents=[common, data], help="plan a workload across platforms")
    w.add_argument("workload", help="workload file")
    w.add_argument("--objective", choices=devicelab.OBJECTIVES)
    w.set_defaults(func=cmd_partition)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.verb == "bench" else "text"
    try:
        return args.func(args, out)
    except InfeasibleWorkloadError as exc:
        print(f"mcfpga: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except EmptyDataError as exc:
        print(f"mcfpga: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataParseError as exc:
        print(f"mcfpga: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigurationError, InvalidObservationError, UnprofileableTaskError, PlanIntegrityError) as exc:
        print(f"mcfpga: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry():  # console-script wrapper
    sys.exit(main())
