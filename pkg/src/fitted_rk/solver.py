"""n-term series solution by the lagged coefficient sweep.

The approximation is ``y_n(t) = c + sum_i A_i psibar_i(t)`` where ``c`` is the
constant initial guess and ``psibar_i = sum_{k<=i} beta_ik psi_k``. One sweep
visits the nodes in order; at node ``k`` the right-hand side is sampled on
the partial sum built from ``A_1..A_{k-1}``::

    F_k = F(t_k, y_{k-1}(t_k), y'_{k-1}(t_k), y''_{k-1}(t_k))
    A_k = sum_{j<=k} beta_kj F_j

so that ``y_n'''(t_j) = F_j`` holds exactly at every node.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSet, GridSpec, build_basis
from .errors import DomainError, NoConvergence, NonFiniteF
from .expr.ast import Expr, Num, compile_ast, eval_ast
from .expr.problem import ProblemFile, derive_forcing

log = logging.getLogger(__name__)

__all__ = [
    "ProblemSpec",
    "Solution",
    "solve",
    "picard_solve",
    "evaluate_solution",
    "residual_at_nodes",
    "true_residual_at_nodes",
]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """``y''' + G(t, y, y1, y2) = f(t)``; ``F = f - G``."""

    G: Expr
    f: Expr
    exact: Expr | None = None
    level: float = 0.0
    name: str = "problem"

    def __post_init__(self):
        object.__setattr__(self, "_G", compile_ast(self.G, ("t", "y", "y1", "y2")))
        object.__setattr__(self, "_f", compile_ast(self.f, ("t",)))

    @classmethod
    def from_file(cls, pf: ProblemFile) -> ProblemSpec:
        f = derive_forcing(pf) if pf.manufactured else pf.forcing
        return cls(G=pf.lhs_extra, f=f, exact=pf.exact, level=pf.level, name=pf.name)

    @classmethod
    def zero(cls) -> ProblemSpec:
        return cls(G=Num(0.0), f=Num(0.0), name="zero")

    def F(self, t: float, y: float, y1: float, y2: float) -> float:
        return self._f(t) - self._G(t, y, y1, y2)

    def exact_value(self, t: float) -> float:
        if self.exact is None:
            raise ValueError(f"{self.name} has no exact solution")
        return eval_ast(self.exact, {"t": t})


@dataclass(frozen=True, eq=False)
class Solution:
    basis: BasisSet
    A: np.ndarray
    F_values: np.ndarray
    level: float
    weights: np.ndarray  # w_k = sum_{i>=k} A_i beta_ik
    lagged_args: np.ndarray  # (n, 3) arguments y, y', y'' used for F_k
    passes: int = 1
    history: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def grid(self) -> GridSpec:
        return self.basis.grid

    def __call__(self, t, order: int = 0):
        return evaluate_solution(self, t, order)

    def norm_sequence(self) -> np.ndarray:
        """``sum_{i<=k} A_i^2`` for ``k = 1..n``, the squared norms of the partial sums."""
        return np.cumsum(self.A**2)


class _NodeCache:
    """psi values and derivatives at the collocation nodes."""

    def __init__(self, basis: BasisSet):
        nodes = basis.grid.nodes
        self.V = [basis.values(nodes, o) for o in range(4)]


def _sweep(problem: ProblemSpec, basis: BasisSet, cache: _NodeCache, A_prev: np.ndarray):
    n = basis.n
    B = basis.beta
    t = basis.grid.nodes
    V0, V1, V2 = cache.V[:3]
    A = np.zeros(n)
    F = np.zeros(n)
    lagged = np.zeros((n, 3))
    # psi-weights of the lagged function: partial sum of this pass plus the
    # tail of the previous one (zero on a first pass)
    w = B.T @ A_prev
    for k in range(n):
        y = problem.level + V0[k] @ w
        y1 = V1[k] @ w
        y2 = V2[k] @ w
        lagged[k] = (y, y1, y2)
        tk = float(t[k])
        try:
            Fk = problem.F(tk, y, y1, y2)
        except (DomainError, ZeroDivisionError, OverflowError) as exc:
            raise NonFiniteF(k + 1, (tk, y, y1, y2), exc) from exc
        if not math.isfinite(Fk):
            raise NonFiniteF(k + 1, (tk, y, y1, y2))
        F[k] = Fk
        A[k] = B[k, : k + 1] @ F[: k + 1]
        w = w + (A[k] - A_prev[k]) * B[k]
    return A, F, lagged


def _package(problem, basis, cache, A, F, lagged, passes, history, elapsed) -> Solution:
    B = basis.beta
    w = B.T @ A
    for arr in (A, F, w, lagged):
        arr.setflags(write=False)
    sol = Solution(basis, A, F, problem.level, w, lagged, passes, tuple(history))
    third = cache.V[3] @ w
    sol.diagnostics.update(
        lagged_residual=third - F,
        true_residual=third - _true_F(problem, sol, cache),
        passes=passes,
        seconds=elapsed,
    )
    return sol


def _true_F(problem, sol, cache):
    out = np.empty(sol.basis.n)
    y, y1, y2 = (problem.level + cache.V[0] @ sol.weights, cache.V[1] @ sol.weights, cache.V[2] @ sol.weights)
    for k, t in enumerate(sol.grid.nodes):
        try:
            out[k] = problem.F(float(t), y[k], y1[k], y2[k])
        except (DomainError, ZeroDivisionError, OverflowError):
            out[k] = math.nan
    return out


def _basis_for(grid, basis):
    if basis is not None:
        return basis
    if isinstance(grid, int):
        grid = GridSpec.uniform(grid)
    return build_basis(grid)


def solve(problem: ProblemSpec, grid: GridSpec | int | None = None, *, basis: BasisSet | None = None) -> Solution:
    """One forward sweep, starting from the constant initial guess."""
    start = time.perf_counter()
    basis = _basis_for(grid, basis)
    cache = _NodeCache(basis)
    A, F, lagged = _sweep(problem, basis, cache, np.zeros(basis.n))
    return _package(problem, basis, cache, A, F, lagged, 1, (), time.perf_counter() - start)


def _node_state(problem, cache, A, B):
    w = B.T @ A
    return np.stack([problem.level + cache.V[0] @ w, cache.V[1] @ w, cache.V[2] @ w])


def picard_solve(
    problem: ProblemSpec,
    grid: GridSpec | int | None = None,
    max_outer: int = 100,
    tol: float = 1e-12,
    *,
    basis: BasisSet | None = None,
) -> Solution:
    """Repeat the sweep until node values of ``y, y', y''`` stop changing.

    Each pass after the first samples ``F`` on the current partial sum plus
    the remaining terms of the previous pass's solution. ``max_outer=1`` is
    exactly `solve`.
    """
    if max_outer < 1:
        raise ValueError("max_outer must be at least 1")
    start = time.perf_counter()
    basis = _basis_for(grid, basis)
    cache = _NodeCache(basis)
    B = basis.beta
    A_prev = np.zeros(basis.n)
    state_prev = None
    history = []
    for p in range(1, max_outer + 1):
        A, F, lagged = _sweep(problem, basis, cache, A_prev)
        state = _node_state(problem, cache, A, B)
        if state_prev is not None:
            change = float(np.max(np.abs(state - state_prev)))
            history.append(change)
            log.debug("%s: pass %d change %.3e", problem.name, p, change)
            if change < tol:
                return _package(problem, basis, cache, A, F, lagged, p, history, time.perf_counter() - start)
        A_prev, state_prev = A, state
    sol = _package(problem, basis, cache, A, F, lagged, max_outer, history, time.perf_counter() - start)
    if max_outer == 1:
        return sol
    raise NoConvergence(sol, history)


def evaluate_solution(sol: Solution, t, order: int = 0):
    """``y_n^(order)(t)`` for ``order`` in 0..3; `t` scalar or array in [0, 1]."""
    if order not in (0, 1, 2, 3):
        raise DomainError(f"derivative order {order} outside 0..3")
    scalar = np.ndim(t) == 0
    pts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~((pts >= 0.0) & (pts <= 1.0))):
        raise DomainError("evaluation point outside [0, 1]")
    vals = sol.basis.values(pts, order) @ sol.weights
    if order == 0:
        vals = vals + sol.level
    return float(vals[0]) if scalar else vals


def residual_at_nodes(sol: Solution, problem: ProblemSpec | None = None) -> np.ndarray:
    """``y_n'''(t_j) - F_j`` with the lagged samples ``F_j``; zero up to rounding."""
    third = sol.basis.values(sol.grid.nodes, 3) @ sol.weights
    return third - sol.F_values


def true_residual_at_nodes(sol: Solution, problem: ProblemSpec) -> np.ndarray:
    """``y_n'''(t_j) - F(t_j, y_n, y_n', y_n'')`` on the final solution."""
    cache = _NodeCache(sol.basis)
    return cache.V[3] @ sol.weights - _true_F(problem, sol, cache)
