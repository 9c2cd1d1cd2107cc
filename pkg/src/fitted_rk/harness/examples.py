"""The three benchmark problems, stored in the ordinary problem-file format."""
from __future__ import annotations

from ..expr.problem import ProblemFile, parse_problem

EXAMPLE_FILES = {
    1: """\
# linear: y''' + t y'' = f
name = example1
lhs_extra = t*y2
forcing = manufactured
exact = exp(t^2*(t-1)^2)
default_n = 51
""",
    2: """\
# nonlinear: y''' - cos(t) (y'')^3 + 2 sinh(y) cosh(y) y' = f
name = example2
lhs_extra = -cos(t)*y2^3 + 2*sinh(y)*cosh(y)*y1
forcing = manufactured
exact = t^2*(1-t)^2/2
default_n = 36
""",
    3: """\
# nonlinear: y''' + y'' + t (y')^2 - acosh(y) = f
name = example3
lhs_extra = y2 + t*y1^2 - acosh(y)
forcing = manufactured
exact = cosh(t^2-t)
default_n = 26
""",
}


def example_problem(example_id: int) -> ProblemFile:
    try:
        text = EXAMPLE_FILES[int(example_id)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown example {example_id!r}; choose 1, 2 or 3") from None
    return parse_problem(text, f"<example{example_id}>")
