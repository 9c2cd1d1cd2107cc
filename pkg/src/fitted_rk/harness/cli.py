"""Command-line entry point.

    fitted-rk solve --problem example2 --n 36
    fitted-rk bench --examples 1,2,3 --n-list 11,26,51 --out bench.csv
    fitted-rk kernel-check --grid 21

Exit status: 0 on success, 1 for input or parse errors, 2 for numerical
failures.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from ..basis import GridSpec, build_basis
from ..errors import BCViolation, FittedRKError, InputError, NumericalError
from ..expr.problem import load_problem
from ..solver import ProblemSpec, picard_solve
from .diagnostics import kernel_check
from .examples import example_problem
from .tables import DEFAULT_OUTER, OUTER_TOL, REPORT_POINTS, emit_csv, run_example, table_for

log = logging.getLogger("fitted_rk")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {out!r}: {exc.strerror or exc}") from exc


def _load(name: str):
    if name.startswith("example") and name[len("example"):].isdigit():
        return example_problem(int(name[len("example"):]))
    return load_problem(name)


def cmd_solve(args) -> int:
    pf = _load(args.problem)
    n = args.n or pf.default_n
    problem = ProblemSpec.from_file(pf)
    start = time.perf_counter()
    sol = picard_solve(problem, max_outer=args.picard, tol=OUTER_TOL, basis=build_basis(GridSpec.uniform(n)))
    seconds = time.perf_counter() - start
    if problem.exact is not None:
        table = table_for(sol, problem, seconds)
        if args.out:
            emit_csv(table, args.out)
        else:
            emit_csv(table, sys.stdout)
        summary = f"max abs err {table.max_abs_err:.6e}"
    else:
        lines = ["t,approx"] + [f"{t:.17g},{sol(t):.17g}" for t in REPORT_POINTS]
        _write("\n".join(lines) + "\n", args.out)
        summary = "no exact solution"
    conv = sol.basis.convention
    log.info("%s: n=%d passes=%d %s (%.2fs, jump %+d, adjoint row %s)",
             pf.name, n, sol.passes, summary, seconds, conv.jump, conv.adjoint_row)
    return EXIT_OK


def cmd_bench(args) -> int:
    lines = ["example,n,max_abs_err,passes,seconds"]
    for e in args.examples:
        for n in args.n_list:
            table = run_example(e, n, outer=args.picard)
            lines.append(f"{e},{n},{table.max_abs_err:.17g},{table.passes},{table.seconds:.3f}")
            log.info("example %d n=%d: max abs err %.6e", e, n, table.max_abs_err)
            if args.tables:
                Path(args.tables).mkdir(parents=True, exist_ok=True)
                emit_csv(table, Path(args.tables) / f"example{e}_n{n}.csv")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_kernel_check(args) -> int:
    report = kernel_check(args.grid)
    _write(report.to_text(), args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not argparse's default status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fitted-rk", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one problem and print its error table")
    p.add_argument("--problem", required=True, help="problem file path or example1/example2/example3")
    p.add_argument("--n", type=int, help="number of collocation nodes (default: the problem's default_n)")
    p.add_argument("--picard", type=int, default=DEFAULT_OUTER,
                   help=f"maximum outer passes; 1 is the bare sweep (default {DEFAULT_OUTER})")
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run the built-in examples over several n")
    p.add_argument("--examples", type=_int_list, default=[1, 2, 3])
    p.add_argument("--n-list", type=_int_list, default=[11, 26, 51])
    p.add_argument("--picard", type=int, default=DEFAULT_OUTER)
    p.add_argument("--tables", help="directory for the per-run error tables")
    p.add_argument("--out", help="summary CSV destination (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("kernel-check", help="kernel diagnostics report")
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--out", help="report destination (default stdout)")
    p.set_defaults(func=cmd_kernel_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "n", None) is not None and args.n < 2:
            raise InputError(f"--n must be at least 2, got {args.n}")
        if getattr(args, "picard", 1) < 1:
            raise InputError("--picard must be at least 1")
        return args.func(args)
    except (InputError, BCViolation, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FittedRKError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
