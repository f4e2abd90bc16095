"""Command-line entry points.

    teleshield run --tasks 3 --delay constant:200 --margin on --seed 7 --out out/
    teleshield matrix --seed 7 --out out/
    teleshield gen-task --seed 7
    teleshield serve --port 8765 --seed 7 --delay gaussian:50,20

Delay specs use milliseconds: none, constant:D, gaussian:MEAN,STD,
uniform:LO,HI, or trace:FILE (trace files hold seconds per line).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from .channel import parse_delay_spec
from .harness import (
    DEFAULT_MASTER_SEED,
    matrix_tasks,
    rows_to_csv,
    run_matrix,
    summary_table,
)
from .loop import ClosedLoop, RunConfig
from .tasks import format_task, generate_task, parse_task


def _margin_flag(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("margin must be 'on' or 'off'")
    return value == "on"


def _delay_spec(value: str) -> str:
    parse_delay_spec(value)  # validate eagerly, keep the string
    return value


def _add_run_args(p):
    p.add_argument("--delay", type=_delay_spec, default="none",
                   help="delay model, e.g. gaussian:50,20 (ms)")
    p.add_argument("--margin", type=_margin_flag, default=True,
                   help="delay-adaptive margin: on or off (default on)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plant", choices=("ideal", "forcepid"), default="ideal")
    p.add_argument("--time-limit", type=float, default=120.0)


def cmd_run(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tasks = matrix_tasks(args.seed, args.tasks)
    config = RunConfig(
        delay_spec=args.delay,
        margin=args.margin,
        seed=args.seed,
        plant=args.plant,
        time_limit=args.time_limit,
    )
    failures = 0
    for i, task in enumerate(tasks):
        (out / f"task_{i}.txt").write_text(format_task(task))
        loop = ClosedLoop(task, dataclasses.replace(config, seed=args.seed + i))
        if args.realtime:
            t0 = time.monotonic()
            while not loop.finished:
                loop.step()
                lag = loop.now - (time.monotonic() - t0)
                if lag > 0:
                    time.sleep(lag)
            result = loop.run()
        else:
            result = loop.run()
        (out / f"run_task{i}.csv").write_text(rows_to_csv(result.rows))
        status = "ok" if result.success else ("COLLISION" if result.collision else "timeout")
        print(
            f"task {i}: {status}  targets {result.targets_reached}/{result.targets_total}"
            f"  min_surf {result.min_surface_distance:.3f} m  t={result.duration:.1f} s"
        )
        failures += int(not result.success)
    return 1 if failures else 0


def cmd_matrix(args) -> int:
    def progress(label, margin, i, result):
        flag = "on " if margin else "off"
        mark = "ok" if result.success else ("collision" if result.collision else "timeout")
        print(f"[{label:>14} margin={flag}] task {i}: {mark}")

    summary = run_matrix(args.seed, args.out, progress=progress if args.verbose else None)
    print(summary_table(summary))
    print(f"summary written to {Path(args.out) / 'summary.json'}")
    return 0


def cmd_gen_task(args) -> int:
    task = generate_task(args.seed)
    sys.stdout.write(format_task(task))
    return 0


def cmd_serve(args) -> int:
    # imported lazily so the batch tools work without the network stack
    import asyncio

    from .service import TeleopService

    if args.task:
        task = parse_task(Path(args.task).read_text())
    else:
        task = generate_task(args.seed)
    config = RunConfig(
        delay_spec=args.delay,
        margin=args.margin,
        seed=args.seed,
        plant=args.plant,
        time_limit=float("inf"),
        stop_on_collision=False,
        solve_time_model=None,
    )
    service = TeleopService(task, config, host=args.host, port=args.port,
                            pace=args.pace)
    try:
        asyncio.run(service.serve_forever())
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teleshield",
        description="Delay-adaptive safe teleoperation: batch runs and live service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run generated tasks under one delay condition")
    p.add_argument("--tasks", type=int, default=1, help="number of tasks to run")
    _add_run_args(p)
    p.add_argument("--out", required=True, help="output directory for CSV logs")
    p.add_argument("--realtime", action="store_true",
                   help="pace the simulation to wall time")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("matrix", help="full sweep: tasks x delays x margin on/off")
    p.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p.add_argument("--out", required=True)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("gen-task", help="print a generated task to stdout")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_task)

    p = sub.add_parser("serve", help="WebSocket teleoperation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--task", help="task file (default: generate from --seed)")
    p.add_argument("--pace", type=float, default=1.0,
                   help="simulation speed relative to wall time (0 = free-run)")
    _add_run_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
