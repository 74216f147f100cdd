"""Small numerical kernels: panel-doubling Simpson and bisection."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import DomainError, NumericalError

__all__ = ["simpson", "bisect"]


def simpson(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
            rtol: float = 1e-10, atol: float = 0.0, panels: int = 64,
            max_doublings: int = 24) -> float:
    """Composite Simpson rule, doubling the panel count until converged.

    ``func`` must accept an array of abscissae. The trapezoid sums are
    refined in place so every level only evaluates the new midpoints; the
    Simpson estimate with ``2N`` intervals is ``(4 T_2N - T_N) / 3``.

    Raises
    ------
    NumericalError
        If ``|S_new - S_old| <= rtol |S_new| + atol`` is not reached within
        ``max_doublings`` doublings.
    """
    if b == a:
        return 0.0
    n = int(panels)
    x = np.linspace(a, b, n + 1)
    fx = np.asarray(func(x), dtype=float)
    h = (b - a) / n
    trap = h * (fx.sum() - 0.5 * (fx[0] + fx[-1]))

    def refine(trap, n):
        h = (b - a) / n
        mid = a + h * (np.arange(n) + 0.5)
        return 0.5 * trap + 0.5 * h * float(np.sum(func(mid))), 2 * n

    trap2, n = refine(trap, n)
    s_old = (4.0 * trap2 - trap) / 3.0
    trap = trap2
    for _ in range(max_doublings):
        trap2, n = refine(trap, n)
        s_new = (4.0 * trap2 - trap) / 3.0
        if not math.isfinite(s_new):
            raise NumericalError("non-finite integrand value")
        if abs(s_new - s_old) <= rtol * abs(s_new) + atol:
            return float(s_new)
        s_old, trap = s_new, trap2
    raise NumericalError(f"Simpson quadrature did not converge after {max_doublings} doublings")


def bisect(func: Callable[[float], float], lo: float, hi: float,
           xtol: float = 1e-12, max_iter: int = 400) -> float:
    """Root of ``func`` on ``[lo, hi]`` by bisection.

    The bracket is halved until it is narrower than ``xtol`` *and* can no
    longer be split in floating point, so small roots come out with full
    relative precision.
    """
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise DomainError("root is not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    else:
        raise NumericalError("bisection exhausted its iteration budget")
    if hi - lo > xtol:
        raise NumericalError("bisection stalled above tolerance")
    return 0.5 * (lo + hi)

