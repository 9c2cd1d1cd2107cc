import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fitted_rk.basis import GridSpec
from fitted_rk.errors import DomainError, NoConvergence, NonFiniteF
from fitted_rk.expr import parse
from fitted_rk.harness.examples import example_problem
from fitted_rk.solver import (
    ProblemSpec, evaluate_solution, picard_solve, residual_at_nodes, solve, true_residual_at_nodes,
)

LINEAR = ProblemSpec(G=parse("0"), f=parse("-(2*pi)^3*cos(2*pi*t)"), exact=parse("sin(2*pi*t)"), name="linear")


def test_zero_problem_gives_zero(basis11):
    sol = solve(ProblemSpec.zero(), basis=basis11)
    assert np.all(sol.A == 0)
    assert sol(np.linspace(0, 1, 5)).tolist() == [0.0] * 5


def test_linear_problem_converges(basis11, basis51):
    t = np.linspace(0, 1, 101)
    errs = [np.max(np.abs(solve(LINEAR, basis=b)(t) - np.sin(2 * np.pi * t))) for b in (basis11, basis51)]
    assert errs[1] < errs[0] / 10
    assert errs[1] < 2e-3


def test_linear_problem_needs_no_outer_passes(basis11):
    a = solve(LINEAR, basis=basis11)
    b = picard_solve(LINEAR, basis=basis11)
    assert b.passes == 2
    np.testing.assert_array_equal(a.A, b.A)


def test_single_outer_pass_is_the_sweep(basis11):
    problem = ProblemSpec.from_file(example_problem(1))
    np.testing.assert_array_equal(solve(problem, basis=basis11).A, picard_solve(problem, max_outer=1, basis=basis11).A)


def test_outer_iteration_reports_nonconvergence(basis11):
    problem = ProblemSpec.from_file(example_problem(1))
    with pytest.raises(NoConvergence) as info:
        picard_solve(problem, max_outer=3, basis=basis11)
    assert len(info.value.history) == 2


def test_outer_iteration_contracts(basis51):
    sol = picard_solve(ProblemSpec.from_file(example_problem(1)), basis=basis51)
    h = np.array(sol.history)
    assert np.all(np.diff(h) < 0)
    assert np.max(np.abs(true_residual_at_nodes(sol, ProblemSpec.from_file(example_problem(1))))) < 1e-8


@given(coeffs=st.lists(st.floats(-50, 50), min_size=1, max_size=5), level=st.floats(-2, 2))
@settings(max_examples=25, deadline=None)
def test_lagged_residual_identity(coeffs, level, basis11):
    # y_n'''(t_j) equals the sampled F_j whatever F is
    f = " + ".join(f"({c!r})*t^{k}" for k, c in enumerate(coeffs))
    problem = ProblemSpec(G=parse("0.3*sin(y) + y1*y2"), f=parse(f), level=level)
    sol = solve(problem, basis=basis11)
    scale = max(1.0, np.max(np.abs(sol.F_values)))
    assert np.max(np.abs(residual_at_nodes(sol))) <= 1e-10 * scale


def test_norm_sequence_nondecreasing(basis11):
    sol = solve(ProblemSpec.from_file(example_problem(2)), basis=basis11)
    assert np.all(np.diff(sol.norm_sequence()) >= 0)


def test_nonfinite_forcing_names_node(basis11):
    problem = ProblemSpec(G=parse("log(y - 5)"), f=parse("0"))
    with pytest.raises(NonFiniteF) as info:
        solve(problem, basis=basis11)
    assert info.value.k == 1
    assert info.value.args_[0] == 0.0


def test_overflow_is_nonfinite(basis11):
    with pytest.raises(NonFiniteF):
        solve(ProblemSpec(G=parse("exp(1000 + y)"), f=parse("0")), basis=basis11)


def test_evaluate_solution_bounds(basis11):
    sol = solve(LINEAR, basis=basis11)
    with pytest.raises(DomainError):
        evaluate_solution(sol, 1.5)
    with pytest.raises(DomainError):
        evaluate_solution(sol, 0.5, order=4)
    assert isinstance(sol(0.3), float)
    assert sol(np.array([0.3])).shape == (1,)


def test_derivatives_follow_finite_differences(basis51):
    sol = solve(LINEAR, basis=basis51)
    h = 1e-5
    for order in (1, 2, 3):
        for t in (0.2, 0.55):
            fd = (sol(t + h, order - 1) - sol(t - h, order - 1)) / (2 * h)
            assert sol(t, order) == pytest.approx(fd, rel=1e-5, abs=1e-5)


def test_grid_argument_forms():
    a = solve(LINEAR, 6)
    b = solve(LINEAR, GridSpec.uniform(6))
    np.testing.assert_array_equal(a.A, b.A)
    assert math.isfinite(a.diagnostics["seconds"])
