"""Dense monomial polynomials and breakpoint-partitioned piecewise polynomials.

Coefficients are stored lowest degree first, ``c[0] + c[1] t + ...``.
Everything here is immutable; arrays are flagged read-only on construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError

__all__ = [
    "Polynomial",
    "PiecewisePolynomial",
    "poly_eval",
    "poly_derive",
    "integrate_product",
    "piecewise_eval",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, ndmin=1)
    if arr.ndim != 1:
        raise ValueError("coefficients must be one-dimensional")
    if arr.size == 0:
        arr = np.zeros(1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Polynomial:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))

    @classmethod
    def monomial(cls, degree: int, scale: float = 1.0) -> Polynomial:
        c = np.zeros(degree + 1)
        c[degree] = scale
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, t, order: int = 0):
        return poly_eval(self, t, order)

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"Polynomial({np.array2string(self.coeffs, precision=6)})"


def poly_eval(p: Polynomial, t, order: int = 0):
    """Value of the ``order``-th derivative of `p` at `t` (scalar or array)."""
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    c = p.coeffs
    if order:
        if order > c.size - 1:
            return np.zeros_like(np.asarray(t, dtype=float))[()]
        c = npoly.polyder(c, order)
    # Horner, highest coefficient first
    t = np.asarray(t, dtype=float)
    acc = np.full_like(t, c[-1])
    for ck in c[-2::-1]:
        acc = acc * t + ck
    return acc[()]


def poly_derive(p: Polynomial, k: int = 1) -> Polynomial:
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    if k == 0:
        return p
    if k > p.degree:
        return Polynomial([0.0])
    return Polynomial(npoly.polyder(p.coeffs, k))


def integrate_product(p: Polynomial, q: Polynomial, a: float, b: float) -> float:
    """Exact integral of ``p(v) q(v)`` over ``[a, b]`` via the antiderivative."""
    if a > b:
        raise ValueError(f"integration bounds out of order: {a} > {b}")
    anti = npoly.polyint(npoly.polymul(p.coeffs, q.coeffs))
    return float(npoly.polyval(b, anti) - npoly.polyval(a, anti))


@dataclass(frozen=True, eq=False)
class PiecewisePolynomial:
    """Polynomial pieces on ``[breakpoints[i], breakpoints[i+1]]``.

    At an interior breakpoint the piece on the left wins (``t <= s``).
    """

    breakpoints: np.ndarray
    pieces: tuple

    def __post_init__(self):
        bp = _frozen(self.breakpoints)
        if bp.size < 2 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing with at least two entries")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("breakpoints must span [0, 1]")
        pieces = tuple(p if isinstance(p, Polynomial) else Polynomial(p) for p in self.pieces)
        if len(pieces) != bp.size - 1:
            raise ValueError(f"need {bp.size - 1} pieces for {bp.size} breakpoints, got {len(pieces)}")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def split_at(cls, s: float, left: Polynomial, right: Polynomial) -> PiecewisePolynomial:
        """Two-branch function with `left` on ``t <= s`` and `right` on ``t > s``.

        At ``s == 0`` (``s == 1``) the left (right) branch covers a single point
        and is dropped; callers rely on smoothness across `s` for that.
        """
        if s <= 0.0:
            return cls([0.0, 1.0], (right,))
        if s >= 1.0:
            return cls([0.0, 1.0], (left,))
        return cls([0.0, s, 1.0], (left, right))

    def piece_index(self, t: float) -> int:
        # searchsorted 'left' puts an exact interior breakpoint in the left piece
        i = int(np.searchsorted(self.breakpoints, t, side="left")) - 1
        return min(max(i, 0), len(self.pieces) - 1)

    def derive(self, k: int = 1) -> PiecewisePolynomial:
        return PiecewisePolynomial(self.breakpoints, tuple(poly_derive(p, k) for p in self.pieces))

    def __call__(self, t, order: int = 0):
        if np.ndim(t) == 0:
            return piecewise_eval(self, float(t), order)
        t = np.asarray(t, dtype=float)
        if np.any((t < 0.0) | (t > 1.0)):
            raise DomainError("evaluation point outside [0, 1]")
        idx = np.clip(np.searchsorted(self.breakpoints, t, side="left") - 1, 0, len(self.pieces) - 1)
        out = np.empty_like(t)
        for i, p in enumerate(self.pieces):
            mask = idx == i
            if mask.any():
                out[mask] = poly_eval(p, t[mask], order)
        return out


def piecewise_eval(pw: PiecewisePolynomial, t: float, order: int = 0) -> float:
    if not (0.0 <= t <= 1.0) or math.isnan(t):
        raise DomainError(f"evaluation point {t!r} outside [0, 1]")
    return float(poly_eval(pw.pieces[pw.piece_index(t)], t, order))
