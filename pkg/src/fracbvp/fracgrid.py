"""Shifted integer grids, functions sampled on them, and forward differences.

A shifted grid is the arithmetic progression ``a, a+1, ..., a+m-1`` with unit
step and real offset ``a`` (offsets like ``v - 3`` arise throughout).  Grids
and grid functions are immutable; every operator returns a new value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

#: Two grids are considered aligned when their offsets differ by less than this.
OFFSET_TOL = 1e-9


@dataclass(frozen=True)
class ShiftedGrid:
    """The points ``offset + k`` for ``0 <= k < count``."""

    offset: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvalidArgument(f"grid needs at least one point, got count={self.count}")
        if not math.isfinite(self.offset):
            raise InvalidArgument("grid offset must be finite")

    def point(self, k: int) -> float:
        return self.offset + k

    def points(self) -> np.ndarray:
        return self.offset + np.arange(self.count, dtype=float)

    def matches(self, other: "ShiftedGrid") -> bool:
        return self.count == other.count and abs(self.offset - other.offset) <= OFFSET_TOL


def make_grid(offset: float, count: int) -> ShiftedGrid:
    """Build the grid ``offset, offset+1, ..., offset+count-1``."""
    return ShiftedGrid(offset, count)


@dataclass(frozen=True)
class GridFn:
    """A real-valued function sampled on a :class:`ShiftedGrid`."""

    grid: ShiftedGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] != self.grid.count:
            raise InvalidArgument(
                f"values must be a length-{self.grid.count} vector, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("grid function values must all be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.grid.count

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: "GridFn") -> "GridFn":
        if not isinstance(other, GridFn):
            return NotImplemented
        if not self.grid.matches(other.grid):
            raise InvalidArgument("cannot combine grid functions on misaligned grids")
        return GridFn(self.grid, self.values + other.values)

    def __rmul__(self, scalar: float) -> "GridFn":
        return GridFn(self.grid, float(scalar) * self.values)


def grid_fn(offset: float, values) -> GridFn:
    """Shorthand for ``GridFn(make_grid(offset, len(values)), values)``."""
    values = np.asarray(values, dtype=float)
    return GridFn(make_grid(offset, values.shape[0]), values)


def sample(fn, grid: ShiftedGrid) -> GridFn:
    """Sample a scalar callable at every grid point."""
    return GridFn(grid, np.array([fn(t) for t in grid.points()], dtype=float))


def delta(f: GridFn, order: int) -> GridFn:
    """Order-th forward difference; same offset, count reduced by ``order``.

    ``delta(f, 1)(t) = f(t+1) - f(t)``; higher orders by iteration;
    ``delta(f, 0)`` is ``f`` itself.
    """
    if order < 0:
        raise InvalidArgument(f"difference order must be nonnegative, got {order}")
    if order >= f.grid.count:
        raise InvalidArgument(
            f"difference order {order} needs more than {f.grid.count} points"
        )
    if order == 0:
        return f
    return GridFn(
        make_grid(f.grid.offset, f.grid.count - order),
        np.diff(f.values, n=order),
    )
