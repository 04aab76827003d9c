"""Command-line entry point: ``sensorsched <command> CONFIG [options]``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import bounds as bnd
from .config import load_config
from .dutycycle import construct_from_duty_cycles, solve_lower_bound
from .errors import ConfigError, InfeasibleError, SchedError
from .heuristics import brute_force_optimal, mef_schedule, rh_schedule
from .mdp import build_mdp, solve_average_reward
from .schedule import Schedule, evaluate_cost

log = logging.getLogger("sensorsched")

CSV_HEADER = ("method", "cost", "period", "schedule", "state_count", "wall_time_s")


@dataclass
class SolveReport:
    method: str
    cost: float
    schedule: Schedule | None = None
    bounds: bnd.OffDutyBounds | None = None
    state_count: int | None = None
    wall_time: float = 0.0
    extra: dict | None = None

    def row(self):
        return (
            self.method,
            repr(float(self.cost)),
            "" if self.schedule is None else self.schedule.period,
            "" if self.schedule is None else str(self.schedule),
            "" if self.state_count is None else self.state_count,
            f"{self.wall_time:.6f}",
        )


def write_csv(path, reports):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in reports:
            w.writerow(r.row())


def _bounds(problem, args):
    mode = args.bound_mode or problem.options["bound_mode"]
    return bnd.all_bounds(problem.systems, mode)


def run(command, problem, args):
    """Dispatch one command; returns a SolveReport (``None`` for info-only commands)."""
    systems = problem.systems
    t0 = time.perf_counter()
    if command == "steady":
        for s in systems:
            print(f"system {s.id}: Tr P = {np.trace(s.steady):.6f}  rho(A) = {s.rho:.6f}")
            print(np.array2string(s.steady, precision=6))
        return None
    if command == "bounds":
        b = _bounds(problem, args)
        print(f"bound mode: {b.mode}")
        for i, d in enumerate(b.per_sensor, start=1):
            print(f"sensor {i}: max off-duty {d}")
        return SolveReport("bounds", float("nan"), bounds=b, wall_time=time.perf_counter() - t0)
    if command == "evaluate":
        sched = Schedule.parse(args.schedule)
        br = evaluate_cost(systems, sched)
        return SolveReport("evaluate", br.total, sched, wall_time=time.perf_counter() - t0,
                           extra={"per_sensor": br.per_sensor})
    if command == "solve":
        method = args.method
        if method == "mdp":
            b = _bounds(problem, args)
            model = build_mdp(systems, b)
            sol = solve_average_reward(model)
            return SolveReport("mdp", sol.cost, sol.schedule, b, model.n_states,
                               time.perf_counter() - t0)
        if method == "mef":
            res = mef_schedule(systems)
            return SolveReport("mef", res.cost, res.schedule, wall_time=time.perf_counter() - t0)
        if method == "rh":
            window = args.window or problem.options["rh_window"]
            res = rh_schedule(systems, int(window))
            return SolveReport(f"rh-{window}", res.cost, res.schedule,
                               wall_time=time.perf_counter() - t0)
        if method == "brute":
            period = args.max_period or problem.options["max_period"]
            sched, cost = brute_force_optimal(systems, int(period))
            return SolveReport("brute", cost, sched, wall_time=time.perf_counter() - t0)
        raise ConfigError(f"unknown method {method!r}")
    if command in ("lower-bound", "construct"):
        b = _bounds(problem, args)
        prof = solve_lower_bound(systems, b)
        fr = ", ".join(str(f) for f in prof.fractions)
        if command == "lower-bound":
            print(f"duty cycles: {fr}")
            return SolveReport("lower-bound", prof.lower_bound_value, bounds=b,
                               wall_time=time.perf_counter() - t0)
        sched = construct_from_duty_cycles(prof, cap=int(problem.options["construction_cap"]))
        if sched is None:
            raise InfeasibleError(f"no uniform schedule realises duty cycles ({fr})")
        cost = evaluate_cost(systems, sched).total
        return SolveReport("construct", cost, sched, b, wall_time=time.perf_counter() - t0)
    raise ConfigError(f"unknown command {command!r}")


def _print_report(r):
    print(f"{'method':<12}{'cost':>14}  {'period':>6}  schedule")
    period = "-" if r.schedule is None else r.schedule.period
    sched = "-" if r.schedule is None else str(r.schedule)
    if len(sched) > 120:
        sched = sched[:117] + "..."
    print(f"{r.method:<12}{r.cost:>14.6f}  {period:>6}  {sched}")
    if r.state_count is not None:
        print(f"states: {r.state_count}")


def build_parser():
    p = argparse.ArgumentParser(prog="sensorsched", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="JSON problem file")
        sp.add_argument("--bound-mode", choices=bnd.BOUND_MODES)
        sp.add_argument("--riccati", choices=("standard", "transposed"))
        sp.add_argument("--csv", metavar="PATH")
        return sp

    common(sub.add_parser("steady", help="steady-state covariances"))
    common(sub.add_parser("bounds", help="off-duty bounds"))
    s = common(sub.add_parser("solve", help="compute a schedule"))
    s.add_argument("--method", choices=("mdp", "mef", "rh", "brute"), default="mdp")
    s.add_argument("--window", type=int)
    s.add_argument("--max-period", type=int)
    common(sub.add_parser("lower-bound", help="duty-cycle lower bound"))
    common(sub.add_parser("construct", help="schedule from optimal duty cycles"))
    e = common(sub.add_parser("evaluate", help="average cost of a schedule"))
    e.add_argument("--schedule", required=True, help='comma-separated slots, e.g. "1,2,1,3"')
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        problem = load_config(args.config, {"riccati": args.riccati})
        report = run(args.command, problem, args)
    except SchedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    if report is not None:
        if report.method != "bounds":
            _print_report(report)
        if args.csv:
            write_csv(args.csv, [report])
    return 0


if __name__ == "__main__":
    sys.exit(main())
