import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fitted_rk.errors import BCViolation, DomainError, ParseError, ProblemFileError, Unsupported, UnboundVariable
from fitted_rk.expr import (
    compile_ast, differentiate, eval_ast, free_variables, nth_derivative, parse, parse_problem, to_text,
)
from fitted_rk.expr.calculus import CHAIN_Y
from fitted_rk.harness.examples import EXAMPLE_FILES

# (our syntax, python syntax) pairs over t, built side by side so Python's own
# evaluator is the oracle for the parser and evaluator
_LEAVES = st.sampled_from([("t", "t"), ("pi", "math.pi"), ("2", "2.0"), ("0.5", "0.5"), ("3e-1", "0.3")])
_FUNCS = ["sin", "cos", "exp", "tanh", "sinh"]


def _extend(children):
    unary = st.tuples(st.sampled_from(_FUNCS), children).map(
        lambda p: (f"{p[0]}({p[1][0]})", f"math.{p[0]}({p[1][1]})")
    )
    neg = children.map(lambda c: (f"-({c[0]})", f"-({c[1]})"))
    binary = st.tuples(st.sampled_from("+-*"), children, children).map(
        lambda p: (f"({p[1][0]}) {p[0]} ({p[2][0]})", f"({p[1][1]}) {p[0]} ({p[2][1]})")
    )
    return unary | neg | binary


exprs = st.recursive(_LEAVES, _extend, max_leaves=8)
points = st.floats(0.0, 1.0)


def _python(src, t):
    try:
        return eval(src, {"math": math, "t": t})
    except OverflowError:
        return math.inf


@given(exprs, points)
@settings(max_examples=200)
def test_eval_matches_python(pair, t):
    ours, py = pair
    expected = _python(py, t)
    assume(math.isfinite(expected) and abs(expected) < 1e100)
    assert eval_ast(parse(ours), {"t": t}) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@given(exprs, points)
@settings(max_examples=200)
def test_to_text_round_trip(pair, t):
    ast = parse(pair[0])
    again = parse(to_text(ast))
    a, b = (eval_ast(x, {"t": t}) for x in (ast, again))
    assume(math.isfinite(a))
    assert a == b


@given(exprs, st.floats(0.05, 0.95))
@settings(max_examples=150)
def test_derivative_matches_finite_difference(pair, t):
    ast = parse(pair[0])
    f = compile_ast(ast, ("t",))
    h = 1e-4
    # fourth-order central difference
    fd = (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)
    d = eval_ast(differentiate(ast), {"t": t})
    assume(math.isfinite(fd) and abs(fd) < 1e6)
    # rounding in the difference quotient grows with |f| / h
    noise = 1e-14 * max(abs(f(t + s * h)) for s in (-2, -1, 1, 2)) / h
    assert d == pytest.approx(fd, rel=1e-5, abs=1e-6 + noise)


@pytest.mark.parametrize(
    "text,value",
    [("1+2*3", 7.0), ("2^3^2", 512.0), ("-2^2", -4.0), ("2**3", 8.0), ("(1+2)*3", 9.0), ("8/2/2", 2.0)],
)
def test_precedence(text, value):
    assert eval_ast(parse(text), {}) == value


def test_known_values():
    assert eval_ast(parse("cosh(t^2-t)"), {"t": 1.0}) == 1.0
    third = nth_derivative(parse("exp(t^2*(t-1)^2)"), 3)
    assert eval_ast(third, {"t": 0.0}) == pytest.approx(-12.0)


def test_chain_rule_through_y_slots():
    d = differentiate(parse("y*y1 + sin(y2)"), chain=CHAIN_Y)
    env = {"t": 0.0, "y": 2.0, "y1": 3.0, "y2": 0.5, "y3": 7.0}
    # y1*y1 + y*y2 + cos(y2)*y3
    assert eval_ast(d, env) == pytest.approx(9.0 + 1.0 + math.cos(0.5) * 7.0)


def test_variable_exponent_rules():
    assert eval_ast(differentiate(parse("2^t")), {"t": 1.0}) == pytest.approx(2 * math.log(2))
    with pytest.raises(Unsupported):
        differentiate(parse("t^t"))


@pytest.mark.parametrize(
    "text,offset",
    [
        ("sin(", 4),
        ("", 0),
        ("1 +", 3),
        ("foo(t)", 0),
        ("sin()", 4),
        ("()", 1),
        ("t(2)", 1),
        ("1 2", 2),
        ("3 $ 4", 2),
        ("(t", 2),
        ("cos t", 4),
        ("t )", 2),
    ],
)
def test_malformed_corpus(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_offsets_are_bytes():
    with pytest.raises(ParseError) as info:
        parse("t\u00a0+ $")  # no-break space is two bytes
    assert info.value.offset == 5


@pytest.mark.parametrize(
    "text,arg",
    [("log(t)", 0.0), ("sqrt(t)", -1.0), ("acosh(t)", 0.5), ("1/t", 0.0), ("t^0.5", -1.0)],
)
def test_domain_errors(text, arg):
    with pytest.raises(DomainError):
        eval_ast(parse(text), {"t": arg})


def test_acosh_tolerates_rounding_below_one():
    assert eval_ast(parse("acosh(t)"), {"t": 1 - 1e-14}) == 0.0


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        eval_ast(parse("t + y"), {"t": 1.0})
    assert free_variables(parse("t*y1 + pi")) == {"t", "y1"}


def test_problem_file_parsing():
    pf = parse_problem(EXAMPLE_FILES[2])
    assert pf.manufactured and pf.default_n == 36 and pf.level == 0.0
    pf3 = parse_problem(EXAMPLE_FILES[3])
    assert pf3.level == 1.0


@pytest.mark.parametrize(
    "text",
    [
        "name = a\nlhs_extra = y\n",  # missing forcing
        "name = a\nlhs_extra = y\nforcing = manufactured\n",  # no exact
        "name = a\nname = b\nlhs_extra = y\nforcing = 0\n",
        "name = a\nlhs_extra = y3\nforcing = 0\n",
        "name = a\nlhs_extra = y\nforcing = 0\ncolour = red\n",
        "name = a\nlhs_extra = y +\nforcing = 0\n",
        "name = a\nlhs_extra = y\nforcing = 0\ndefault_n = ten\n",
        "just a line\n",
    ],
)
def test_problem_file_errors(text):
    with pytest.raises(ProblemFileError):
        parse_problem(text)


def test_problem_file_rejects_nonperiodic_exact():
    with pytest.raises(BCViolation):
        parse_problem("name = a\nlhs_extra = y\nforcing = manufactured\nexact = t\n")
