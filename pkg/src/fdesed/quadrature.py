"""Adaptive Simpson quadrature.

This is the reference integrator used to check every series expansion in
the package, so it deliberately shares no code with :mod:`fdesed.series`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import QuadratureNonConvergence


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_depth: int = 40

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError(f"max_depth must be an integer >= 1, got {self.max_depth}")


DEFAULT_QUADRATURE = QuadratureConfig()


def integrate(fn: Callable[[float], float], lower: float, upper: float,
              quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Integrate ``fn`` over ``[lower, upper]`` by adaptive Simpson bisection.

    Each panel is accepted once the difference between the one-panel and
    two-half-panel Simpson estimates is below ``15 * tol``, where ``tol`` is
    the share of ``abs_tol`` allotted to the panel (halved on every split).
    The accepted value carries the Richardson correction.

    Raises
    ------
    QuadratureNonConvergence
        If a panel still fails the test after ``max_depth`` bisections.
    """
    lower = float(lower)
    upper = float(upper)
    if upper < lower:
        raise ValueError(f"lower bound {lower} exceeds upper bound {upper}")
    if upper == lower:
        return 0.0

    def f(x):
        return float(fn(x))

    fa, fb = f(lower), f(upper)
    mid = 0.5 * (lower + upper)
    fm = f(mid)
    whole = (upper - lower) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    # (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(lower, upper, fa, fm, fb, whole, quad.abs_tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
            continue
        if depth + 1 >= quad.max_depth:
            raise QuadratureNonConvergence(
                f"adaptive Simpson did not reach abs_tol={quad.abs_tol:g} on "
                f"[{a:.6g}, {b:.6g}] within max_depth={quad.max_depth}"
            )
        stack.append((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
        stack.append((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1))
    return total
