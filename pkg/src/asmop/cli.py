"""Command-line interface: ``asmop {run,compare,pareto,validate-config,selftest}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .baselines import deterministic_motr, run_smg
from .dataio import SOLVER_NAMES, build_problem, load_config, write_front, write_trace
from .errors import ConfigError
from .front import build_front
from .plots import emit_plot
from .selftest import run_selftest
from .solver import run

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("asmop")


def _apply_overrides(config, args):
    if getattr(args, "budget", None) is not None:
        config.solver = dataclasses.replace(config.solver, budget=args.budget)
        config.smg = dataclasses.replace(config.smg, budget=args.budget)
    if getattr(args, "seed", None) is not None:
        config.seeds = [args.seed]
    if getattr(args, "solver", None) is not None:
        config.solvers = [args.solver]
    if getattr(args, "out", None) is not None:
        config.output = args.out
    problems = config.solver.problems() + config.smg.problems()
    if problems:
        raise ConfigError(problems)
    return config


def _out_dir(config):
    out = Path(config.output)
    if not out.is_absolute():
        out = Path(config.base_dir) / out
    out.mkdir(parents=True, exist_ok=True)
    return out


def solve(config, solver, seed):
    problem = build_problem(config)
    if solver == "asmop":
        return run(problem, config.solver, seed=seed)
    if solver == "det-motr":
        return deterministic_motr(problem, config.solver, seed=seed)
    return run_smg(problem, config.smg, seed=seed)


def _summary(trace, solver, seed):
    last = trace.records[-1] if trace.records else None
    if last is None:
        return f"{solver} seed={seed}: no iterations"
    omega = last.omega_true if last.omega_true is not None else last.omega_sub
    return (f"{solver} seed={seed}: iterations={len(trace)} cost={last.cost} omega={omega:.6g} "
            f"sizes={list(last.sizes)} stop={trace.stop_reason}")


def _run_many(config, solvers):
    out = _out_dir(config)
    traces, labels = [], []
    for solver in solvers:
        for seed in config.seeds:
            _, trace = solve(config, solver, seed)
            trace.solver = solver
            write_trace(trace, out / f"{solver}_seed{seed}.csv")
            print(_summary(trace, solver, seed))
            traces.append(trace)
            labels.append(f"{config.label(solver)} seed {seed}" if len(config.seeds) > 1 else config.label(solver))
    return out, traces, labels


def cmd_run(args):
    config = _apply_overrides(load_config(args.config), args)
    out, traces, labels = _run_many(config, config.solvers[:1])
    emit_plot(traces, "omega-vs-cost", out / "omega.svg", labels)
    emit_plot(traces, "samplesize-vs-cost", out / "samplesize.svg", labels)
    return EXIT_OK


def cmd_compare(args):
    config = _apply_overrides(load_config(args.config), args)
    out, traces, labels = _run_many(config, config.solvers)
    emit_plot(traces, "omega-vs-cost", out / "compare_omega.svg", labels)
    emit_plot(traces, "samplesize-vs-cost", out / "compare_samplesize.svg", labels)
    return EXIT_OK


def cmd_pareto(args):
    config = _apply_overrides(load_config(args.config), args)
    out = _out_dir(config)
    problem = build_problem(config)
    archive = build_front(problem, config.solver, config.front)
    write_front(archive, out / "front.csv")
    if problem.q == 2:
        emit_plot(archive, "front", out / "front.svg")
    else:
        log.warning("front plot skipped: %d objectives (only q = 2 is plotted)", problem.q)
    print(f"front: {len(archive)} nondominated points after {archive.generation} rounds")
    return EXIT_OK


def cmd_validate(args):
    config = load_config(args.config)
    print(f"{args.config}: OK ({config.problem.family}, solvers={config.solvers}, seeds={config.seeds})")
    return EXIT_OK


def cmd_selftest(args):
    return EXIT_OK if run_selftest() else EXIT_RUNTIME


def build_parser():
    parser = argparse.ArgumentParser(prog="asmop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_overrides(p):
        p.add_argument("config", help="YAML experiment configuration")
        p.add_argument("--seed", type=int, help="run this single seed instead of the configured list")
        p.add_argument("--budget", type=int, help="scalar-product budget per run")
        p.add_argument("--solver", choices=SOLVER_NAMES, help="solver to use instead of the configured one(s)")
        p.add_argument("--out", help="output directory (relative paths resolve against the config)")
        return p

    with_overrides(sub.add_parser("run", help="run one solver per seed, write traces and plots")).set_defaults(
        func=cmd_run)
    with_overrides(sub.add_parser("compare", help="run every configured solver and overlay the plots")).set_defaults(
        func=cmd_compare)
    with_overrides(sub.add_parser("pareto", help="approximate the Pareto front")).set_defaults(func=cmd_pareto)
    p = sub.add_parser("validate-config", help="check a configuration file and exit")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    sub.add_parser("selftest", help="run the fast invariant suite").set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # runtime failures map to exit code 2
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
