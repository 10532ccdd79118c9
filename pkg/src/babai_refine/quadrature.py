"""Adaptive Simpson quadrature for piecewise-smooth entropy integrands."""

from __future__ import annotations

from typing import Callable

from .errors import QuadratureFailure

MAX_DEPTH = 40


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float = 1e-9,
    max_depth: int = MAX_DEPTH,
) -> float:
    """Integrate f over [a, b] to absolute tolerance abs_tol.

    Classic recursive Simpson with Richardson correction; the caller is
    responsible for splitting at interior kinks of f.  Raises
    QuadratureFailure if the recursion depth limit is hit before the local
    error estimate falls below tolerance.
    """
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureFailure(
            f"adaptive Simpson did not converge on [{a}, {b}] "
            f"(remaining error estimate {abs(delta) / 15.0:.3e} > {tol:.3e})"
        )
    return _simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )
