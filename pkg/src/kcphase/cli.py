"""Command line entry point: ``kcphase <command> ...``.

Exit status is 0 on success, 1 on a usage or configuration error and 2 when
a command fails at run time.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import analysis
from .cnf import GenParams, brute_force_count, emit_dimacs, generate_instance, parse_dimacs
from .estimators import compile_instance
from .obdd import DEFAULT_NODE_CAP
from .pathstruct import PhaseExperimentConfig, phase_experiment
from .plots import KINDS, emit_plots
from .sweep import (SweepConfig, phase_from_csv, phase_to_csv, r_grid, run_sweep, sweep_from_csv,
                    sweep_to_csv)
from .validation import LANGUAGES

log = logging.getLogger("kcphase")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    g.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP, help="node/state budget per compilation")
    g.add_argument("--time-cap", type=float, default=None, help="seconds per compilation")
    g.add_argument("--jobs", type=int, default=1, help="worker processes")
    g.add_argument("--out", default="-", help="output file ('-' for stdout)")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _grid_args(p):
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--r-start", type=float, default=0.2)
    p.add_argument("--r-stop", type=float, default=4.2)
    p.add_argument("--r-step", type=float, default=0.2)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="kcphase", description="Compile random k-SAT instances and measure compiled sizes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="emit one random instance as DIMACS")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--m", type=int)
    grp.add_argument("--r", type=float)

    p = sub.add_parser("compile", parents=[common], help="compile one DIMACS instance")
    p.add_argument("input", help="DIMACS file ('-' for stdin)")
    p.add_argument("--lang", choices=LANGUAGES, default="dnnf")

    p = sub.add_parser("count", parents=[common], help="brute-force model count")
    p.add_argument("input", help="DIMACS file ('-' for stdin)")

    p = sub.add_parser("sweep", parents=[common], help="mean compiled sizes over an r grid")
    _grid_args(p)
    p.add_argument("--n", type=int, nargs="+", default=[20])
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--lang", choices=LANGUAGES, nargs="+", default=["dnnf"])
    p.add_argument("--timing", action="store_true", help="record mean compile time (breaks byte-identical output)")

    p = sub.add_parser("paths", parents=[common], help="multi-interchangeable path phase experiment")
    _grid_args(p)
    p.add_argument("--n", type=int, default=18)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--threshold", type=int, default=50)

    p = sub.add_parser("fit", parents=[common], help="peaks and growth fits from a sweep CSV")
    p.add_argument("input", help="sweep CSV ('-' for stdin)")

    p = sub.add_parser("plot", parents=[common], help="emit a matplotlib script for a CSV")
    p.add_argument("input", help="sweep or paths CSV")
    p.add_argument("--kind", choices=KINDS, required=True)
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt(x):
    return "none" if x is None else f"{x:g}"


def cmd_gen(args):
    formula = generate_instance(GenParams(args.k, args.n, m=args.m, r=args.r, seed=args.seed))
    return emit_dimacs(formula)


def cmd_compile(args):
    formula = parse_dimacs(_read(args.input))
    res = compile_instance(formula, args.lang, args.node_cap, args.time_cap)
    if res.blowup:
        raise RuntimeError(f"compilation aborted: {res.blowup}")
    return (f"language={res.language} nodes={res.nodes} edges={res.edges} "
            f"models={res.model_count} unsat={str(res.unsat).lower()}\n")


def cmd_count(args):
    return f"{brute_force_count(parse_dimacs(_read(args.input)))}\n"


def cmd_sweep(args):
    config = SweepConfig(k=args.k, n_values=tuple(args.n),
                         r_values=r_grid(args.r_start, args.r_stop, args.r_step),
                         instances_per_point=args.instances, languages=tuple(args.lang),
                         seed=args.seed, node_cap=args.node_cap, time_cap=args.time_cap,
                         timing=args.timing)
    return sweep_to_csv(run_sweep(config, jobs=args.jobs))


def cmd_paths(args):
    config = PhaseExperimentConfig(k=args.k, n=args.n, r_grid=r_grid(args.r_start, args.r_stop, args.r_step),
                                   instances_per_r=args.instances, probe_clauses=args.probes,
                                   threshold=args.threshold, seed=args.seed, node_cap=args.node_cap,
                                   time_cap=args.time_cap)
    return phase_to_csv(phase_experiment(config, jobs=args.jobs))


def cmd_fit(args):
    rows = sweep_from_csv(_read(args.input))
    lines = ["# peaks: k n language r_c(smoothed) r_c(raw) r_c/r_p"]
    for p in analysis.all_peaks(rows):
        ratio = None if p.r_c is None else p.r_c / analysis.threshold_for(p.k)
        lines.append(f"peak {p.k} {p.n} {p.language} {_fmt(p.r_c)} {_fmt(p.r_c_raw)} "
                     f"{'none' if ratio is None else f'{ratio:.4f}'}")
    lines.append("# growth: k r language points semilog_slope semilog_r2 loglog_slope loglog_r2")
    for g in analysis.all_growth_fits(rows):
        lines.append(f"growth {g.k} {g.r:g} {g.language} {g.points} {g.semilog_slope:.6f} "
                     f"{g.semilog_r2:.6f} {g.loglog_slope:.6f} {g.loglog_r2:.6f}")
    return "\n".join(lines) + "\n"


def cmd_plot(args):
    text = _read(args.input)
    rows = phase_from_csv(text) if args.kind == "phase-fraction-vs-r" else sweep_from_csv(text)
    csv_path = "data.csv" if args.input == "-" else args.input
    return emit_plots(rows, args.kind, csv_path=csv_path)


COMMANDS = {"gen": cmd_gen, "compile": cmd_compile, "count": cmd_count, "sweep": cmd_sweep,
            "paths": cmd_paths, "fit": cmd_fit, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            parser.error("--jobs must be at least 1")
        if args.node_cap < 1:
            parser.error("--node-cap must be positive")
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = COMMANDS[args.command](args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"kcphase: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"kcphase: failed: {exc}", file=sys.stderr)
        return 2
    _write(args.out, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
