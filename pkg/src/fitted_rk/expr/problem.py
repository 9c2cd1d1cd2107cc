"""Problem files: ``y''' + G(t, y, y', y'') = f(t)`` with periodic conditions.

Line-oriented UTF-8 text::

    # comment
    name = example2
    lhs_extra = -cos(t)*y2^3 + 2*sinh(y)*cosh(y)*y1
    forcing = manufactured          # or an expression in t
    exact = t^2*(1-t)^2/2           # required iff manufactured
    default_n = 36
    y0 = 0                          # optional constant level, see below

``y0`` is the constant initial guess added to the series solution. Every
collocation function vanishes at ``t = 0``, so the series alone pins
``y(0) = 0``; the constant level supplies ``y(0)``. It defaults to
``exact(0)`` when an exact solution is given and to 0 otherwise.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import BCViolation, DomainError, ParseError, ProblemFileError
from .ast import Expr, Var, eval_ast, free_variables, make_add, substitute
from .calculus import nth_derivative
from .parser import parse

__all__ = ["ProblemFile", "parse_problem", "load_problem", "derive_forcing", "check_periodic"]

_KEYS = {"name", "lhs_extra", "forcing", "exact", "default_n", "y0"}
_REQUIRED = ("name", "lhs_extra", "forcing")
_G_VARS = {"t", "y", "y1", "y2"}
DEFAULT_N = 51
PERIODIC_TOL = 1e-9


@dataclass(frozen=True)
class ProblemFile:
    name: str
    lhs_extra: Expr
    forcing: Expr | None  # None means manufactured
    exact: Expr | None = None
    default_n: int = DEFAULT_N
    y0: float | None = None
    source: str = ""

    @property
    def manufactured(self) -> bool:
        return self.forcing is None

    @property
    def level(self) -> float:
        """Constant initial guess for the sweep."""
        if self.y0 is not None:
            return self.y0
        if self.exact is not None:
            return eval_ast(self.exact, {"t": 0.0})
        return 0.0


def _expr(key, text, lineno, allowed):
    try:
        ast = parse(text)
    except ParseError as exc:
        raise ProblemFileError(f"line {lineno}: {key}: {exc}") from exc
    extra = free_variables(ast) - allowed
    if extra:
        raise ProblemFileError(
            f"line {lineno}: {key} uses {', '.join(sorted(extra))}; allowed: {', '.join(sorted(allowed))}"
        )
    return ast


def check_periodic(exact: Expr, tol: float = PERIODIC_TOL) -> None:
    for k in range(3):
        dk = nth_derivative(exact, k)
        gap = abs(eval_ast(dk, {"t": 0.0}) - eval_ast(dk, {"t": 1.0}))
        if not gap <= tol:
            raise BCViolation(f"exact solution derivative {k} differs by {gap:.3e} between t=0 and t=1")


def parse_problem(text: str, source: str = "<string>") -> ProblemFile:
    seen: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ProblemFileError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        # trailing comments
        value = re.sub(r"\s+#.*$", "", value).strip()
        if key not in _KEYS:
            raise ProblemFileError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ProblemFileError(f"{source}:{lineno}: duplicate key {key!r} (first on line {seen[key][1]})")
        if not value:
            raise ProblemFileError(f"{source}:{lineno}: empty value for {key!r}")
        seen[key] = (value, lineno)
    missing = [k for k in _REQUIRED if k not in seen]
    if missing:
        raise ProblemFileError(f"{source}: missing key(s): {', '.join(missing)}")

    name = seen["name"][0]
    lhs = _expr("lhs_extra", *seen["lhs_extra"], _G_VARS)
    ftext, fline = seen["forcing"]
    forcing = None if ftext == "manufactured" else _expr("forcing", ftext, fline, {"t"})
    exact = _expr("exact", *seen["exact"], {"t"}) if "exact" in seen else None
    if forcing is None and exact is None:
        raise ProblemFileError(f"{source}: forcing = manufactured requires an exact solution")
    default_n = DEFAULT_N
    if "default_n" in seen:
        text_n, line_n = seen["default_n"]
        try:
            default_n = int(text_n)
        except ValueError:
            raise ProblemFileError(f"{source}:{line_n}: default_n must be an integer") from None
        if default_n < 2:
            raise ProblemFileError(f"{source}:{line_n}: default_n must be at least 2")
    y0 = None
    if "y0" in seen:
        y0_ast = _expr("y0", *seen["y0"], set())
        y0 = eval_ast(y0_ast, {})
    if exact is not None:
        check_periodic(exact)
    return ProblemFile(name, lhs, forcing, exact, default_n, y0, source)


def load_problem(path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(f"cannot read problem file {path}: {exc}") from exc
    return parse_problem(text, str(path))


def derive_forcing(problem: ProblemFile) -> Expr:
    """``f = u''' + G(t, u, u', u'')`` for the exact solution ``u``."""
    if problem.exact is None:
        raise ProblemFileError(f"{problem.name}: no exact solution to manufacture forcing from")
    check_periodic(problem.exact)
    u = problem.exact
    derivs = [nth_derivative(u, k) for k in range(4)]
    g = substitute(problem.lhs_extra, {"y": derivs[0], "y1": derivs[1], "y2": derivs[2], "t": Var("t")})
    f = make_add(derivs[3], g)
    for i in range(11):
        t = i / 10
        try:
            v = eval_ast(f, {"t": t})
        except DomainError as exc:
            raise DomainError(f"{problem.name}: manufactured forcing undefined at t={t}: {exc}") from exc
        if not math.isfinite(v):
            raise DomainError(f"{problem.name}: manufactured forcing not finite at t={t}")
    return f
