"""Expression language for problem definitions."""
from .ast import (
    Bin, Expr, Func, Num, Var, compile_ast, eval_ast, free_variables, substitute, to_text,
)
from .calculus import differentiate, nth_derivative
from .parser import parse
from .problem import ProblemFile, check_periodic, derive_forcing, load_problem, parse_problem

__all__ = [
    "Bin", "Expr", "Func", "Num", "Var",
    "compile_ast", "eval_ast", "free_variables", "substitute", "to_text",
    "differentiate", "nth_derivative", "parse",
    "ProblemFile", "check_periodic", "derive_forcing", "load_problem", "parse_problem",
]
