"""Deterministic scalar searches: coarse grid + golden section, and bisection."""

from __future__ import annotations

import math
from typing import Callable

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def minimize_convex(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    coarse: int = 33,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Global minimum of a convex function on [lo, hi].

    Coarse uniform grid picks the bracketing interval, golden section
    refines it to ``tol`` in the argument.  Returns (value, argmin).
    """
    grid = [lo + (hi - lo) * i / (coarse - 1) for i in range(coarse)]
    vals = [f(x) for x in grid]
    i = min(range(coarse), key=lambda k: vals[k])
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, coarse - 1)]
    if a == b:
        return vals[i], grid[i]

    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    xm = 0.5 * (a + b)
    fm = f(xm)
    # keep the best point actually evaluated (endpoints included)
    best = min((fm, xm), (f1, x1), (f2, x2), (vals[i], grid[i]))
    return best


def maximize_concave(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    coarse: int = 33,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Global maximum of a concave (or unimodal) function on [lo, hi]."""
    value, arg = minimize_convex(lambda x: -f(x), lo, hi, coarse=coarse, tol=tol)
    return -value, arg


def bisect_decreasing(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
) -> float:
    """Root of a monotonically decreasing function on [lo, hi]."""
    glo, ghi = g(lo), g(hi)
    if glo < 0:
        return lo
    if ghi > 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
