"""Command-line front end.

Flags select what to do; scenario files specify what to run, so any run
is reproducible from checked-in configs. Long-form flags only.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analyze, layout, report
from .scenario import builtin_scenarios, find_builtin, load_scenario, \
    run_scenario
from .sweep import run_sweep


def _parser():
    p = argparse.ArgumentParser(
        prog="irqsim",
        description="Cycle-level interrupt architecture benchmarks for a "
                    "small RV32 core.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and print its row")
    run.add_argument("--scenario", required=True,
                     help="scenario file, or the name of a built-in "
                          "scenario (see sweep)")
    run.add_argument("--out", help="directory for the trace and row CSV")
    run.add_argument("--trace", choices=("off", "events", "full"),
                     default="events", help="trace detail written to --out")
    run.add_argument("--force", action="store_true",
                     help="overwrite existing output files")

    sw = sub.add_parser("sweep", help="run the full acceptance sweep")
    sw.add_argument("--out", help="directory for reports, traces, figures")
    sw.add_argument("--trace", choices=("off", "events", "full"),
                    default="events", help="trace detail written to --out")
    sw.add_argument("--jobs", type=int, default=1,
                    help="scenario-level parallelism")
    sw.add_argument("--force", action="store_true",
                    help="overwrite an existing output directory")

    dm = sub.add_parser("dump-map", help="print the memory map")
    dm.add_argument("--abi", choices=("I", "E"), default="I")

    df = sub.add_parser("dump-frame", help="print the save-frame layout")
    df.add_argument("--abi", choices=("I", "E"), default="I")
    return p


def _no_clobber(paths, force: bool):
    if force:
        return
    hits = [str(p) for p in paths if p.exists()]
    if hits:
        raise SystemExit(f"refusing to overwrite {', '.join(hits)} "
                         f"(use --force)")


def _resolve_scenario(arg: str):
    path = Path(arg)
    if path.exists():
        return load_scenario(path)
    try:
        return find_builtin(arg)
    except KeyError:
        raise SystemExit(
            f"no scenario file {arg!r} and no built-in scenario by that "
            f"name; built-ins: "
            + ", ".join(sc.name for sc in builtin_scenarios()))


def _cmd_run(args) -> int:
    sc = _resolve_scenario(args.scenario)
    res = run_scenario(sc, trace="full")
    m = analyze.measure(res.events, sc.measurement)
    row = {"scenario": sc.name, "controller": sc.controller, "abi": sc.abi,
           "measurement": sc.measurement}
    row.update(m.as_row())
    csv_text = report.render_csv([row])
    sys.stdout.write(csv_text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        row_path = out / f"{sc.name}.csv"
        trace_path = out / f"{sc.name}.trace"
        targets = [row_path]
        if args.trace != "off":
            targets.append(trace_path)
        _no_clobber(targets, args.force)
        row_path.write_text(csv_text)
        if args.trace != "off":
            trace_path.write_text(res.trace_text(args.trace))
    return 0


def _cmd_sweep(args) -> int:
    if not builtin_scenarios():
        raise SystemExit("scenario set is empty")
    if args.out:
        out = Path(args.out)
        _no_clobber([out / "report.csv", out / "acceptance.txt"],
                    args.force)
    outcome = run_sweep(outdir=args.out, jobs=args.jobs,
                        trace_level=args.trace)
    header = f"{'scenario':<18} {'ctl':<8} {'abi':<3} cycles"
    print(header)
    print("-" * len(header))
    for row in outcome.rows:
        print(f"{row['scenario']:<18} {row['controller']:<8} "
              f"{row['abi']:<3} {row['cycles']}")
    print()
    for c in outcome.criteria:
        print(c.line())
    return 0 if outcome.ok else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "dump-map":
        print(layout.render_map())
        return 0
    if args.command == "dump-frame":
        print(layout.render_frame(args.abi))
        return 0
    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
