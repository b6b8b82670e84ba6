"""Golden-section minimization of a unimodal scalar function."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

INV_PHI = (math.sqrt(5) - 1) / 2


class BracketError(RuntimeError):
    """The minimum is not interior to the search interval."""


@dataclass(frozen=True)
class GoldenResult:
    x: float
    fx: float
    iterations: int


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   xtol: float = 1e-8, max_iter: int = 500) -> GoldenResult:
    """Minimize ``f`` on ``[lo, hi]`` to absolute tolerance ``xtol`` in ``x``.

    Raises :class:`BracketError` when the iterate collapses onto an end of
    the interval, which means the function is monotone there or not unimodal.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > xtol and it < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        it += 1
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    edge = 10 * max(xtol, (hi - lo) * 1e-12)
    if x - lo < edge or hi - x < edge:
        raise BracketError(f"minimum at the boundary of [{lo}, {hi}] (x = {x})")
    if not math.isfinite(fx):
        raise BracketError(f"non-finite objective at x = {x}")
    return GoldenResult(x, fx, it)
