"""Canonical spaces and metrics used by the fixtures, tests and CLI."""

from __future__ import annotations

import math
from typing import Sequence

from .bicomplex import I1, I2, ONE, Bicomplex, exp_i1
from .pbms import FiniteSpace, MetricFn


def four_point_space(y: float = math.pi / 8) -> FiniteSpace:
    """Four points with distances 0, ``e^{2iy}`` and ``9 e^{2iy}``.

    Point ``a`` precedes ``b`` iff ``b <= a`` numerically.  ``U`` is constant 1
    and ``V`` sends 4 to 2 and everything else to 1.
    """
    e = exp_i1(2.0 * y)
    zero = Bicomplex()
    small = {(1, 2), (1, 3), (2, 3), (3, 3)}
    table = []
    for a in range(1, 5):
        row = []
        for b in range(1, 5):
            key = (min(a, b), max(a, b))
            if key in {(1, 1), (2, 2)}:
                row.append(zero)
            elif key in small:
                row.append(e)
            else:
                row.append(e.scale(9.0))
        table.append(tuple(row))
    order = tuple(tuple(b <= a for b in range(1, 5)) for a in range(1, 5))
    maps = {"U": (0, 0, 0, 0), "V": (0, 0, 0, 1)}
    return FiniteSpace(("1", "2", "3", "4"), tuple(table), order, maps, {"y": y})


def max_power_metric(q: float = 2.0, unit: Bicomplex = ONE + I1) -> MetricFn:
    """``(max(x, y)**q + |x - y|**q) * unit`` on the positive reals."""
    def evaluate(x: float, y: float) -> Bicomplex:
        return unit.scale(max(x, y) ** q + abs(x - y) ** q)

    return MetricFn(evaluate, 2.0 ** q, f"maxpow{q:g}")


def max_power_space(points: Sequence[float] = (2, 5, 6), q: float = 2.0) -> FiniteSpace:
    return FiniteSpace.tabulate(max_power_metric(q), list(points),
                                labels=[f"{p:g}" for p in points], meta={"q": q})


def max_square_metric() -> MetricFn:
    """``max(x, y)**2 * (1 + i2)`` on ``[0, inf)``."""
    return MetricFn(lambda x, y: (ONE + I2).scale(max(x, y) ** 2), 1.0, "maxsq")


def discrete_partial_metric(self_distance: float = 1.0, distance: float = 2.0) -> MetricFn:
    return MetricFn(lambda x, y: Bicomplex(self_distance if x == y else distance), 1.0, "discrete-partial")


def discrete_metric(scale: float = 1.0, s: float = 1.0) -> MetricFn:
    return MetricFn(lambda x, y: Bicomplex(0.0 if x == y else scale), s, "discrete")


def descending_chain(length: int = 5) -> FiniteSpace:
    """Chain ``0..length-1`` with the max partial metric on weights ``2**k - 1``.

    Both maps step one point down (0 stays put), and contract by 1/2 with the
    rational coefficient zero.
    """
    w = [2.0 ** k - 1.0 for k in range(length)]
    unit = ONE + I2
    table = tuple(tuple(unit.scale(max(w[a], w[b])) for b in range(length)) for a in range(length))
    order = tuple(tuple(b <= a for b in range(length)) for a in range(length))
    down = tuple(max(k - 1, 0) for k in range(length))
    return FiniteSpace(tuple(f"p{k}" for k in range(length)), table, order, {"U": down, "V": down})


def induced_failure_space() -> FiniteSpace:
    """Valid at s=2 as a partial b-metric, yet its induced distance needs s=3."""
    unit = ONE + I2
    raw = [[0.0, 3.0, 1.0], [3.0, 0.0, 1.0], [1.0, 1.0, 1.0]]
    return FiniteSpace(("x", "y", "z"), tuple(tuple(unit.scale(v) for v in row) for row in raw))
