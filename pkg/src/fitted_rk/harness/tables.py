"""Error tables at the eleven reporting points, CSV output and convergence runs."""
from __future__ import annotations

import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from ..basis import GridSpec, build_basis
from ..errors import FittedRKError, add_context
from ..kernel import resolve_convention
from ..solver import ProblemSpec, Solution, picard_solve
from .examples import example_problem

__all__ = ["ErrorRow", "ErrorTable", "REPORT_POINTS", "DEFAULT_OUTER", "table_for", "run_example",
           "convergence_run", "emit_csv", "format_csv"]

REPORT_POINTS = tuple(i / 10 for i in range(11))
# outer passes used by default; 1 gives the bare single sweep
DEFAULT_OUTER = 100
OUTER_TOL = 1e-12
CSV_HEADER = "t,exact,approx,abs_err,rel_err"


@dataclass(frozen=True)
class ErrorRow:
    t: float
    exact: float
    approx: float
    abs_err: float
    rel_err: float | None  # None when exact == 0


@dataclass
class ErrorTable:
    rows: list
    name: str
    n: int
    seconds: float
    jump_sign: int
    adjoint_row: str
    passes: int = 1
    meta: dict = field(default_factory=dict)

    @property
    def max_abs_err(self) -> float:
        return max(r.abs_err for r in self.rows)


def table_for(solution: Solution, problem: ProblemSpec, seconds: float = 0.0) -> ErrorTable:
    rows = []
    for t in REPORT_POINTS:
        exact = problem.exact_value(t)
        approx = solution(t)
        err = abs(exact - approx)
        rows.append(ErrorRow(t, exact, approx, err, None if exact == 0 else err / abs(exact)))
    conv = solution.basis.convention
    return ErrorTable(rows, problem.name, solution.basis.n, seconds, conv.jump, conv.adjoint_row, solution.passes)


def run_example(example_id: int, n: int | None = None, outer: int = DEFAULT_OUTER) -> ErrorTable:
    pf = example_problem(example_id)
    n = pf.default_n if n is None else int(n)
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    start = time.perf_counter()
    try:
        problem = ProblemSpec.from_file(pf)
        sol = picard_solve(problem, max_outer=outer, tol=OUTER_TOL, basis=build_basis(GridSpec.uniform(n)))
    except FittedRKError as exc:
        raise add_context(exc, f"{pf.name}, n={n}")
    return table_for(sol, problem, time.perf_counter() - start)


def convergence_run(example_id: int, n_list, outer: int = DEFAULT_OUTER) -> list[tuple[int, float]]:
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list must not be empty")
    return [(n, run_example(example_id, n, outer).max_abs_err) for n in n_list]


def _g17(x: float) -> str:
    return f"{x:.17g}"


def format_csv(table: ErrorTable) -> str:
    lines = [CSV_HEADER]
    for r in table.rows:
        rel = "indeterminate" if r.rel_err is None else _g17(r.rel_err)
        lines.append(",".join([_g17(r.t), _g17(r.exact), _g17(r.approx), _g17(r.abs_err), rel]))
    return "\n".join(lines) + "\n"


def emit_csv(table: ErrorTable, destination: str | Path | TextIO) -> None:
    """Write the table as CSV to a path or an open text stream."""
    text = format_csv(table)
    if isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        destination.write(text)
        return
    path = Path(destination) if str(destination) else None
    if path is None:
        raise OSError(f"cannot write CSV: empty destination path {str(destination)!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {str(path)!r}: {exc.strerror or exc}") from exc


def convention_label() -> str:
    conv = resolve_convention().convention
    return f"jump={conv.jump:+d} adjoint_row={conv.adjoint_row}"
