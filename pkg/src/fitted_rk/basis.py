"""Collocation basis: psi functions, Gram matrix and Gram-Schmidt weights.

For a node ``t_i`` the function ``psi_i(t) = d^3/ds^3 K(t, s)`` at ``s = t_i``
represents the functional ``y -> y'''(t_i)``: ``<y, psi_i> = y'''(t_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Breakdown, CrossCheckFailure
from .kernel import KernelConvention, resolve_convention, synthesize_kernel_at
from .polynomial import PiecewisePolynomial, integrate_product, piecewise_eval, poly_derive

__all__ = [
    "GridSpec",
    "PsiFunction",
    "BasisSet",
    "build_psi",
    "inner_w24",
    "gram_matrix",
    "gram_via_collocation",
    "gram_schmidt",
    "build_basis",
]

CROSS_CHECK_RTOL = 1e-7
BREAKDOWN_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class GridSpec:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a grid needs at least two nodes")
        if np.any(np.diff(nodes) <= 0) or nodes[0] < 0.0 or nodes[-1] > 1.0:
            raise ValueError("grid nodes must be strictly increasing inside [0, 1]")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, n: int) -> GridSpec:
        """``t_i = (i - 1) / (n - 1)`` for ``i = 1..n``."""
        if n < 2:
            raise ValueError(f"n must be at least 2, got {n}")
        return cls(np.arange(n) / (n - 1))

    @property
    def n(self) -> int:
        return self.nodes.size


@dataclass(frozen=True, eq=False)
class PsiFunction:
    index: int
    node: float
    pw: PiecewisePolynomial

    def __call__(self, t, order: int = 0):
        return self.pw(t, order)


@dataclass(frozen=True, eq=False)
class BasisSet:
    grid: GridSpec
    psis: tuple
    gram: np.ndarray
    beta: np.ndarray
    convention: KernelConvention
    gram_check: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.grid.n

    def values(self, points, order: int = 0) -> np.ndarray:
        """Matrix ``V[p, j] = psi_j^(order)(points[p])``."""
        points = np.atleast_1d(np.asarray(points, dtype=float))
        return np.column_stack([psi(points, order) for psi in self.psis])

    def orthonormality_residual(self) -> float:
        B = self.beta
        return float(np.max(np.abs(B @ self.gram @ B.T - np.eye(self.n))))


def build_psi(grid: GridSpec, convention: KernelConvention | None = None) -> list[PsiFunction]:
    conv = convention or resolve_convention().convention
    psis = []
    for i, t_i in enumerate(grid.nodes):
        sl = synthesize_kernel_at(float(t_i), conv)
        psis.append(PsiFunction(i, float(t_i), sl.piecewise(s_order=3)))
    return psis


def inner_w24(u: PiecewisePolynomial, v: PiecewisePolynomial) -> float:
    """``sum_{i<4} u^(i)(0) v^(i)(0) + int_0^1 u''''(x) v''''(x) dx``, exactly."""
    total = sum(piecewise_eval(u, 0.0, i) * piecewise_eval(v, 0.0, i) for i in range(4))
    cuts = np.union1d(u.breakpoints, v.breakpoints)
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        pu = poly_derive(u.pieces[u.piece_index(mid)], 4)
        pv = poly_derive(v.pieces[v.piece_index(mid)], 4)
        total += integrate_product(pu, pv, float(lo), float(hi))
    return float(total)


def gram_matrix(psis) -> np.ndarray:
    n = len(psis)
    G = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = inner_w24(psis[i].pw, psis[j].pw)
    return G


def gram_via_collocation(psis, grid: GridSpec) -> np.ndarray:
    """``G[i, j] = psi_j'''(t_i)``, the same matrix by the reproducing identity."""
    return np.array([[piecewise_eval(p.pw, float(t), 3) for p in psis] for t in grid.nodes])


def check_gram(G: np.ndarray, G_check: np.ndarray, rtol: float = CROSS_CHECK_RTOL) -> float:
    """Largest entrywise disagreement relative to ``max |G|``; raises past `rtol`."""
    scale = float(np.max(np.abs(G)))
    diff = np.abs(G - G_check)
    worst = float(diff.max() / scale)
    if worst > rtol:
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        raise CrossCheckFailure(
            f"Gram routes disagree at entry ({i}, {j}): {G[i, j]!r} vs {G_check[i, j]!r} "
            f"(relative {worst:.3e} > {rtol:g})"
        )
    return worst


def gram_schmidt(G: np.ndarray) -> np.ndarray:
    """Lower-triangular ``B`` with ``B G B^T = I``.

    Modified Gram-Schmidt in the inner product defined by `G`, working on
    coefficient vectors, with one full reorthogonalization pass per vector.
    Row ``i`` of the result expresses the i-th orthonormal function in terms
    of ``psi_1..psi_i``.
    """
    n = G.shape[0]
    B = np.zeros((n, n))
    GB = np.zeros((n, n))  # rows: G @ q_k, cached for O(n) inner products
    largest = 0.0
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1.0
        for _ in range(2):
            for k in range(i):
                v -= (v @ GB[k]) * B[k]
        pivot = float(np.sqrt(max(v @ G @ v, 0.0)))
        largest = max(largest, pivot)
        if pivot < BREAKDOWN_RTOL * largest or pivot == 0.0:
            raise Breakdown(i, pivot, largest)
        B[i] = v / pivot
        GB[i] = G @ B[i]
    return B


def build_basis(
    grid: GridSpec,
    convention: KernelConvention | None = None,
    cross_check: bool = True,
) -> BasisSet:
    conv = convention or resolve_convention().convention
    psis = build_psi(grid, conv)
    G = gram_matrix(psis)
    G_check = None
    if cross_check:
        G_check = gram_via_collocation(psis, grid)
        check_gram(G, G_check)
    beta = gram_schmidt(G)
    for a in (G, beta):
        a.setflags(write=False)
    return BasisSet(grid=grid, psis=tuple(psis), gram=G, beta=beta, convention=conv, gram_check=G_check)
