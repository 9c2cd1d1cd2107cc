"""Expression trees, evaluation and printing.

Node kinds: `Num`, `Var`, `Func` (unary function, including ``neg``) and
`Bin` (``+ - * / ^``). Trees are immutable and hashable. The ``make_*``
helpers fold constants and drop neutral elements; the differentiator
builds everything through them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

from ..errors import DomainError, UnboundVariable

__all__ = [
    "Num", "Var", "Func", "Bin", "Expr",
    "VARIABLES", "FUNCTIONS",
    "make_num", "make_add", "make_sub", "make_mul", "make_div", "make_pow", "make_func", "make_neg",
    "eval_ast", "compile_ast", "to_text", "free_variables", "substitute",
]

VARIABLES = frozenset({"t", "y", "y1", "y2", "y3", "pi"})
FUNCTIONS = frozenset({"sin", "cos", "tan", "exp", "log", "sinh", "cosh", "tanh", "acosh", "sqrt", "neg"})

# acosh arguments this far below 1 are rounding noise around an exact 1
ACOSH_ROUNDING = 1e-12


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if self.name not in VARIABLES:
            raise ValueError(f"unknown variable {self.name!r}")


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in "+-*/^" or len(self.op) != 1:
            raise ValueError(f"unknown operator {self.op!r}")


Expr = Union[Num, Var, Func, Bin]

ZERO, ONE = Num(0.0), Num(1.0)


def _is(e, v):
    return isinstance(e, Num) and e.value == v


def make_num(v) -> Num:
    return Num(float(v))


def make_add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return Bin("+", a, b)


def make_sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if _is(b, 0):
        return a
    if _is(a, 0):
        return make_neg(b)
    return Bin("-", a, b)


def make_mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if _is(a, -1):
        return make_neg(b)
    if _is(b, -1):
        return make_neg(a)
    return Bin("*", a, b)


def make_div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return Num(a.value / b.value)
    if _is(a, 0) and not _is(b, 0):
        return ZERO
    if _is(b, 1):
        return a
    return Bin("/", a, b)


def make_pow(a: Expr, b: Expr) -> Expr:
    if _is(b, 0):
        return ONE
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        try:
            return Num(_pow(a.value, b.value))
        except DomainError:
            pass
    return Bin("^", a, b)


def make_neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Func) and a.name == "neg":
        return a.arg
    return Func("neg", a)


def make_func(name: str, a: Expr) -> Expr:
    if name == "neg":
        return make_neg(a)
    if isinstance(a, Num):
        try:
            return Num(_FUNCS[name](a.value))
        except DomainError:
            pass
    return Func(name, a)


def _log(x):
    if x <= 0:
        raise DomainError(f"log argument {float(x):.17g} is not positive")
    return math.log(x)


def _sqrt(x):
    if x < 0:
        raise DomainError(f"sqrt argument {float(x):.17g} is negative")
    return math.sqrt(x)


def _acosh(x):
    if x < 1.0:
        if x >= 1.0 - ACOSH_ROUNDING:
            return 0.0
        raise DomainError(f"acosh argument {float(x):.17g} is below 1")
    return math.acosh(x)


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _hyp(fn):
    def wrapped(x):
        try:
            return fn(x)
        except OverflowError:
            return math.copysign(math.inf, x) if fn is math.sinh else math.inf
    return wrapped


def _tan(x):
    return math.tan(x)


_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": _tan,
    "exp": _exp,
    "log": _log,
    "sinh": _hyp(math.sinh),
    "cosh": _hyp(math.cosh),
    "tanh": math.tanh,
    "acosh": _acosh,
    "sqrt": _sqrt,
    "neg": lambda x: -x,
}


def _pow(a: float, b: float) -> float:
    if a == 0.0 and b < 0:
        raise DomainError("zero raised to a negative power")
    if a < 0 and b != int(b):
        raise DomainError(f"negative base {float(a):.17g} with non-integer exponent {float(b):.17g}")
    try:
        return float(a ** (int(b) if b == int(b) else b))
    except OverflowError:
        return math.inf


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


_BINOPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "^": _pow,
}


def eval_ast(ast: Expr, env: Mapping[str, float]) -> float:
    """Evaluate in IEEE double precision. ``pi`` is always ``math.pi``."""
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Var):
        if ast.name == "pi":
            return math.pi
        try:
            return float(env[ast.name])
        except KeyError:
            raise UnboundVariable(ast.name) from None
    if isinstance(ast, Func):
        return _FUNCS[ast.name](eval_ast(ast.arg, env))
    return _BINOPS[ast.op](eval_ast(ast.left, env), eval_ast(ast.right, env))


def compile_ast(ast: Expr, params: tuple[str, ...]):
    """Closure equivalent to ``eval_ast`` with positional arguments `params`.

    Unbound variables are reported at compile time rather than per call.
    """
    missing = free_variables(ast) - set(params)
    if missing:
        raise UnboundVariable(sorted(missing)[0])
    slot = {name: i for i, name in enumerate(params)}

    def build(e):
        if isinstance(e, Num):
            v = e.value
            return lambda args: v
        if isinstance(e, Var):
            if e.name == "pi":
                return lambda args: math.pi
            i = slot[e.name]
            return lambda args: args[i]
        if isinstance(e, Func):
            f, inner = _FUNCS[e.name], build(e.arg)
            return lambda args: f(inner(args))
        op, lhs, rhs = _BINOPS[e.op], build(e.left), build(e.right)
        return lambda args: op(lhs(args), rhs(args))

    body = build(ast)
    return lambda *args: body(args)


def free_variables(ast: Expr) -> set[str]:
    if isinstance(ast, Num):
        return set()
    if isinstance(ast, Var):
        return set() if ast.name == "pi" else {ast.name}
    if isinstance(ast, Func):
        return free_variables(ast.arg)
    return free_variables(ast.left) | free_variables(ast.right)


def substitute(ast: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by subtrees, folding constants on the way back up."""
    if isinstance(ast, Num):
        return ast
    if isinstance(ast, Var):
        return mapping.get(ast.name, ast)
    if isinstance(ast, Func):
        return make_func(ast.name, substitute(ast.arg, mapping))
    left, right = substitute(ast.left, mapping), substitute(ast.right, mapping)
    return _MAKERS[ast.op](left, right)


_MAKERS = {"+": make_add, "-": make_sub, "*": make_mul, "/": make_div, "^": make_pow}


def _num_text(v: float) -> str:
    if math.isinf(v) or math.isnan(v):
        raise ValueError(f"cannot print non-finite literal {v!r}")
    text = repr(abs(v))
    if text.endswith(".0"):
        text = text[:-2]
    return f"(-{text})" if v < 0 or (v == 0 and math.copysign(1, v) < 0) else text


def to_text(ast: Expr) -> str:
    """Fully parenthesized text that `parse` reads back to an equal-valued tree."""
    if isinstance(ast, Num):
        return _num_text(ast.value)
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Func):
        if ast.name == "neg":
            return f"(-{to_text(ast.arg)})"
        return f"{ast.name}({to_text(ast.arg)})"
    return f"({to_text(ast.left)} {ast.op} {to_text(ast.right)})"
