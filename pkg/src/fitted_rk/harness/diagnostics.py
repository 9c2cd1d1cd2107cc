"""``kernel-check``: printed-vs-synthesized comparison and reproducing residuals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..expr.ast import compile_ast
from ..expr.calculus import nth_derivative
from ..expr.parser import parse
from ..kernel import (
    ConventionReport,
    kernel_eval,
    printed_kernel_eval,
    resolve_convention,
    synthesize_kernel_at,
    verify_reproducing,
)

# smooth functions satisfying all three periodic conditions
PERIODIC_TEST_FUNCTIONS = {
    "1": "1",
    "sin(2 pi t)": "sin(2*pi*t)",
    "cos(2 pi t)": "cos(2*pi*t)",
    "t^2 (1-t)^2": "t^2*(1-t)^2",
    "exp(sin(2 pi t))": "exp(sin(2*pi*t))",
}


def derivative_table(text: str):
    """``f(t, k)`` returning the k-th derivative (k <= 4) of the expression in t."""
    ast = parse(text)
    fns = [np.vectorize(compile_ast(nth_derivative(ast, k), ("t",)), otypes=[float]) for k in range(5)]

    def f(t, k):
        return fns[k](t)

    return f


@dataclass
class KernelCheckReport:
    grid: int
    printed_max: float
    printed_argmax: tuple
    convention: ConventionReport
    residuals: list  # (function label, s_order, max residual, worst s)
    symmetry_max: float
    jump_error: float
    periodic_max: float
    smooth_max: float

    def to_text(self) -> str:
        conv = self.convention.convention
        out = [
            "kernel-check",
            f"grid: {self.grid} x {self.grid}",
            "",
            "convention trials (gate: sin(2 pi t) residual <= 1e-4 at s = 0.5, 0.37):",
        ]
        for c, res in self.convention.trials:
            shown = "singular" if res is None else f"{res:.3e}"
            out.append(f"  adjoint_row={c.adjoint_row:<8} jump={c.jump:+d}  residual={shown}")
        out += [
            f"resolved: adjoint_row={conv.adjoint_row} jump={conv.jump:+d}",
            "",
            f"printed vs synthesized: max |difference| = {self.printed_max:.6e} "
            f"at (t, s) = ({self.printed_argmax[0]:.4g}, {self.printed_argmax[1]:.4g})",
            "",
            f"symmetry max |K(t,s) - K(s,t)|: {self.symmetry_max:.3e}",
            f"order-7 jump | |jump| - 1 | max: {self.jump_error:.3e}",
            f"periodic conditions max mismatch: {self.periodic_max:.3e}",
            f"smoothness orders 0-6 max mismatch: {self.smooth_max:.3e}",
            "",
            "reproducing residuals |<y, d^k/ds^k K_s> - y^(k)(s)|:",
            f"  {'function':<18} {'k':>2} {'max residual':>14} {'worst s':>9}",
        ]
        for label, k, res, s in self.residuals:
            out.append(f"  {label:<18} {k:>2} {res:>14.3e} {s:>9.4f}")
        return "\n".join(out) + "\n"


def kernel_check(grid: int = 21) -> KernelCheckReport:
    if grid < 2:
        raise ValueError("grid must be at least 2")
    pts = np.linspace(0.0, 1.0, grid)
    conv = resolve_convention()
    slices = [synthesize_kernel_at(float(s)) for s in pts]
    K = np.array([[kernel_eval(sl, float(t)) for sl in slices] for t in pts])  # K[t, s]
    printed = np.array([[printed_kernel_eval(float(t), float(s)) for s in pts] for t in pts])
    diff = np.abs(printed - K)
    i, j = np.unravel_index(np.argmax(diff), diff.shape)

    jump_err = periodic = smooth = 0.0
    for sl in slices:
        left, right = sl.pieces[0]
        jump_err = max(jump_err, abs(abs(right(sl.s, 7) - left(sl.s, 7)) - 1.0))
        smooth = max(smooth, max(abs(right(sl.s, m) - left(sl.s, m)) for m in range(7)))
        periodic = max(periodic, max(abs(kernel_eval(sl, 0.0, m) - kernel_eval(sl, 1.0, m)) for m in range(3)))

    residuals = []
    for label, text in PERIODIC_TEST_FUNCTIONS.items():
        f = derivative_table(text)
        for k in range(4):
            vals = [verify_reproducing(sl, f, s_order=k) for sl in slices]
            w = int(np.argmax(vals))
            residuals.append((label, k, float(vals[w]), float(pts[w])))

    return KernelCheckReport(
        grid=grid,
        printed_max=float(diff[i, j]),
        printed_argmax=(float(pts[i]), float(pts[j])),
        convention=conv,
        residuals=residuals,
        symmetry_max=float(np.max(np.abs(K - K.T))),
        jump_error=float(jump_err),
        periodic_max=float(periodic),
        smooth_max=float(smooth),
    )
