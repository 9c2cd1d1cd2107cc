"""Symbolic differentiation of expression trees."""
from __future__ import annotations

from typing import Mapping

from ..errors import Unsupported
from .ast import (
    Bin, Expr, Func, Num, Var, free_variables,
    make_add, make_div, make_func, make_mul, make_neg, make_num, make_pow, make_sub,
)

__all__ = ["differentiate", "nth_derivative"]

# d/dt of the y-slots when they stand for derivatives of one unknown function
CHAIN_Y = {"y": "y1", "y1": "y2", "y2": "y3"}


def _outer(name: str, u: Expr) -> Expr:
    """Derivative of the unary function `name` evaluated at `u`."""
    if name == "sin":
        return make_func("cos", u)
    if name == "cos":
        return make_neg(make_func("sin", u))
    if name == "tan":
        return make_add(Num(1.0), make_pow(make_func("tan", u), Num(2.0)))
    if name == "exp":
        return make_func("exp", u)
    if name == "log":
        return make_div(Num(1.0), u)
    if name == "sinh":
        return make_func("cosh", u)
    if name == "cosh":
        return make_func("sinh", u)
    if name == "tanh":
        return make_sub(Num(1.0), make_pow(make_func("tanh", u), Num(2.0)))
    if name == "acosh":
        # 1/sqrt(u^2 - 1), split so u slightly above 1 stays accurate
        return make_div(Num(1.0), make_mul(make_func("sqrt", make_sub(u, Num(1.0))),
                                           make_func("sqrt", make_add(u, Num(1.0)))))
    if name == "sqrt":
        return make_div(Num(0.5), make_func("sqrt", u))
    raise Unsupported(f"no derivative rule for {name}")


def differentiate(ast: Expr, var: str = "t", chain: Mapping[str, str] | None = None) -> Expr:
    """Exact derivative of `ast` with respect to `var`.

    Other variables are constants unless `chain` maps them to their own
    derivative variable (e.g. ``CHAIN_Y`` turns ``y`` into ``y1``), which
    gives the total derivative along a solution curve.
    """
    chain = chain or {}

    def d(e: Expr) -> Expr:
        if isinstance(e, Num):
            return Num(0.0)
        if isinstance(e, Var):
            if e.name == var:
                return Num(1.0)
            if e.name in chain:
                return Var(chain[e.name])
            return Num(0.0)
        if isinstance(e, Func):
            du = d(e.arg)
            if e.name == "neg":
                return make_neg(du)
            if isinstance(du, Num) and du.value == 0:
                return Num(0.0)
            return make_mul(_outer(e.name, e.arg), du)
        a, b = e.left, e.right
        if e.op == "+":
            return make_add(d(a), d(b))
        if e.op == "-":
            return make_sub(d(a), d(b))
        if e.op == "*":
            return make_add(make_mul(d(a), b), make_mul(a, d(b)))
        if e.op == "/":
            # (a'b - ab') / b^2
            return make_div(make_sub(make_mul(d(a), b), make_mul(a, d(b))), make_pow(b, Num(2.0)))
        # power
        db = d(b)
        if isinstance(db, Num) and db.value == 0:
            if not isinstance(b, Num) and _depends(b, var, chain):
                raise Unsupported("exponent derivative vanished unexpectedly")
            # constant exponent: c * a^(c-1) * a'
            da = d(a)
            if isinstance(b, Num):
                lower = make_pow(a, make_num(b.value - 1.0))
            else:
                lower = make_pow(a, make_sub(b, Num(1.0)))
            return make_mul(make_mul(b, lower), da)
        if not _depends(a, var, chain):
            # a^v with constant base: a^v * log(a) * v'
            return make_mul(make_mul(e, make_func("log", a)), db)
        raise Unsupported("power with both base and exponent varying")

    return d(ast)


def _depends(e: Expr, var: str, chain: Mapping[str, str]) -> bool:
    names = free_variables(e)
    return var in names or any(n in chain for n in names)


def nth_derivative(ast: Expr, n: int, var: str = "t", chain=None) -> Expr:
    for _ in range(n):
        ast = differentiate(ast, var, chain)
    return ast
