"""Centered cardinal B-splines.

``B_0`` is the indicator of ``[-1/2, 1/2]`` (value 1/2 at the two jumps) and
``B_k`` is ``B_0`` convolved with itself ``k`` times, i.e. the density of a sum
of ``k + 1`` independent uniform variables on ``[-1/2, 1/2]``.

Evaluation uses the Cox-de Boor recursion for uniform knots, which is exact
piecewise-polynomial arithmetic and numerically stable for large ``k`` (the
alternating truncated-power sum is not). The recursion is arranged so that
``bspline(k, -x) == bspline(k, x)`` holds bit-for-bit.
"""

from __future__ import annotations

import numpy as np

MAX_ORDER = 60


def _check_order(k: int, minimum: int = 0) -> int:
    if int(k) != k or k < minimum:
        raise ValueError(f"spline order must be an integer >= {minimum}, got {k!r}")
    if k > MAX_ORDER:
        raise ValueError(f"spline order {k} exceeds the supported maximum {MAX_ORDER}")
    return int(k)


def _box(y: np.ndarray) -> np.ndarray:
    a = np.abs(y)
    return np.where(a < 0.5, 1.0, np.where(a == 0.5, 0.5, 0.0))


def bspline(k: int, x):
    """Evaluate ``B_k(x)``; accepts scalars or arrays."""
    k = _check_order(k)
    x = np.asarray(x, dtype=float)
    # level j holds B_j(x + t) for t = -(k - j)/2 + i, i = 0..k-j
    shifts = np.arange(k + 1) - k / 2.0
    vals = [_box(x + t) for t in shifts]
    for j in range(1, k + 1):
        c = (j + 1) / 2.0
        nxt = []
        for i in range(k - j + 1):
            t = shifts[i] + 0.5 * j
            y = x + t
            # vals[i] is B_{j-1}(x + t - 1/2), vals[i + 1] is B_{j-1}(x + t + 1/2)
            nxt.append(((c + y) * vals[i + 1] + (c - y) * vals[i]) / j)
        vals = nxt
    out = vals[0]
    return float(out) if out.ndim == 0 else out


def bspline_derivative(k: int, x):
    """Exact derivative ``B_k'(x) = B_{k-1}(x + 1/2) - B_{k-1}(x - 1/2)``.

    Order 0 is rejected: the box has no square-integrable derivative, so an
    uncertainty gap of an order-0 cake profile is undefined.
    """
    k = _check_order(k, minimum=1)
    x = np.asarray(x, dtype=float)
    out = np.asarray(bspline(k - 1, x + 0.5) - bspline(k - 1, x - 0.5))
    return float(out) if out.ndim == 0 else out


def bspline_support(k: int) -> tuple[float, float]:
    k = _check_order(k)
    h = (k + 1) / 2.0
    return (-h, h)


def bspline_knots(k: int) -> np.ndarray:
    """Breakpoints ``-(k+1)/2, ..., (k+1)/2`` of the piecewise polynomial."""
    k = _check_order(k)
    return np.arange(k + 2) - (k + 1) / 2.0
