"""Command-line front end.

Exit codes: 0 ok, 1 configuration/usage error, 2 numerical or I/O failure,
3 verification failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, format_config, load_config
from .evolve import NumericalFailure, integrate
from .figures import FIGURES, write_figure
from .io import write_control_table, write_trajectory
from .planner import UnreachableTarget, plan
from .verify import all_passed, format_table, run_suites

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _load(path) -> tuple[RunConfig, Path | None]:
    if path is None:
        return RunConfig(), None
    return load_config(path), Path(path).resolve().parent


def _output(args, cfg: RunConfig):
    return args.output or cfg.output or "-"


def cmd_simulate(args) -> int:
    cfg, base = _load(args.config)
    traj = integrate(cfg.initial_rho(), cfg.schedule(), cfg.control_law(base), cfg.integrator())
    write_trajectory(traj, _output(args, cfg))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    cfg, base = _load(args.config)
    law = cfg.control_law(base)
    n = cfg.integrator().steps
    t = np.arange(0, n + 1, cfg.record_stride) * (cfg.t_max / n)
    write_control_table(t, law.amplitude(cfg.schedule(), t), _output(args, cfg))
    return EXIT_OK


def cmd_figure(args) -> int:
    if args.name not in FIGURES:
        print(f"unknown figure {args.name!r}; choose from {', '.join(FIGURES)}", file=sys.stderr)
        return EXIT_CONFIG
    for p in write_figure(args.name, args.out_dir, dt=args.dt, stride=args.stride):
        print(p)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg, base = _load(args.config)
    checks = run_suites(cfg, cfg.control_law(base))
    print(format_table(checks))
    return EXIT_OK if all_passed(checks) else EXIT_VERIFY


def cmd_plan(args) -> int:
    cfg, _ = _load(args.config)
    try:
        p = plan(args.target_p1, args.target_phase, cfg)
    except UnreachableTarget as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"# target_p1 = {p.target_p1!r}")
    print(f"# target_phase = {p.target_phase!r}")
    print(f"# r_star = {p.r_star!r}")
    print(f"# theta_star = {p.theta_star!r}")
    print(f"# duration = {p.duration!r}")
    if args.emit_config:
        Path(args.emit_config).write_text(format_config(p.config), encoding="utf-8")
    t, om = p.control_samples(args.samples)
    write_control_table(t, om, args.output or "-")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tdfs", description="t-DFS quantum-state engineering toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="integrate the master equation, write a trajectory CSV")
    p.add_argument("config", nargs="?")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synthesize", help="write control-field samples only")
    p.add_argument("config", nargs="?")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("figure", help="write the CSV bundle for one figure")
    p.add_argument("name")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--stride", type=int, default=10)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("config", nargs="?")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plan", help="design a ramp reaching a target population and phase")
    p.add_argument("--target-p1", type=float, required=True)
    p.add_argument("--target-phase", type=float, default=0.0)
    p.add_argument("--config")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--emit-config", help="write the planned run configuration here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_plan)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
