"""Fractional sums and Caputo fractional differences on shifted grids.

For order ``v > 0`` with ``n - 1 < v <= n``:

* the v-th fractional sum of ``f`` on ``N_a`` lives on ``N_{a+v}`` and is
  ``(1/Gamma(v)) * sum_{s=a}^{t-v} (t-s-1)^(v-1) f(s)``;
* the v-th Caputo difference is the ``(n-v)``-th fractional sum of the n-th
  forward difference and lives on ``N_{a+n-v}``.

Kernels are evaluated through :func:`~fracbvp.specfun.falling_factorial`
directly; the O(m^2) cost is fine at the grid sizes this package targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .fracgrid import GridFn, delta, make_grid
from .specfun import falling_factorial


@dataclass(frozen=True)
class FracOrder:
    """A fractional order ``v`` with its ceiling ``n`` (``n - 1 < v <= n``)."""

    v: float
    n: int

    @classmethod
    def of(cls, v: float) -> "FracOrder":
        if not (math.isfinite(v) and v > 0.0):
            raise InvalidArgument(f"fractional order must be finite and positive, got {v!r}")
        return cls(v, math.ceil(v))

    @property
    def integer(self) -> bool:
        return self.v == self.n


def _kernel(v: float, length: int) -> np.ndarray:
    """Weights ``(v-1+d)^(v-1)`` for lags ``d = 0..length-1``."""
    return np.array([falling_factorial(v - 1.0 + d, v - 1.0) for d in range(length)])


def frac_sum(f: GridFn, v: float) -> GridFn:
    """The v-th fractional sum of ``f``; output offset is ``f.offset + v``.

    Output point ``k`` uses input points ``0..k`` (the sum is empty, hence 0,
    below the grid start).
    """
    order = FracOrder.of(v)
    m = f.grid.count
    kernel = _kernel(order.v, m)
    scale = 1.0 / math.exp(math.lgamma(order.v))
    out = np.empty(m)
    for k in range(m):
        out[k] = scale * np.dot(kernel[k::-1], f.values[: k + 1])
    return GridFn(make_grid(f.grid.offset + order.v, m), out)


def caputo_diff(f: GridFn, v: float) -> GridFn:
    """The v-th Caputo fractional difference of ``f``.

    Output lives on ``N_{a + n - v}`` with ``count - n`` points; for integer
    ``v = n`` this is exactly the n-th forward difference.
    """
    order = FracOrder.of(v)
    if f.grid.count <= order.n:
        raise InvalidArgument(
            f"Caputo difference of order {v!r} needs more than {order.n} points, "
            f"got {f.grid.count}"
        )
    dn = delta(f, order.n)
    if order.integer:
        return dn
    return frac_sum(dn, order.n - order.v)
