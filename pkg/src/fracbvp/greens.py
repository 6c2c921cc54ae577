"""Green's function for the third-order-range Caputo difference BVP.

For ``2 < v <= 3`` and horizon ``b`` the kernel on ``t = v-2..v+b`` (rows
``k = 0..b+2``) and ``s = 0..b+1`` is

    G(t,s) = [ (v-1)(t-v+3)(v+b-s-1)^(v-2) - (t-s-1)^(v-1) ] / Gamma(v)   for s < t-v+1
    G(t,s) = [ (v-1)(t-v+3)(v+b-s-1)^(v-2) ] / Gamma(v)                   for s >= t-v+1

with ``alpha(t) = t - v + 3``.  The seam ``s = t-v+1`` belongs to the second
branch; there the first branch's extra term ``(v-2)^(v-1)`` vanishes by the
falling-factorial pole convention, so both branches agree.  The kernel
extends by zero to ``t = v-3`` (where ``alpha`` vanishes) and to ``s = b+2``
(a denominator pole), so those edges are exactly 0.

Derived constants: ``gamma`` bounds window rows of G from below by the
terminal row, ``a_alpha`` does the same for ``alpha``, and ``eta`` / ``rho``
are the maximal full-row and minimal windowed G-weighted sums of a forcing
function ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateColumn, EmptyWindow, InvalidArgument
from .fracgrid import GridFn, OFFSET_TOL
from .specfun import falling_factorial

#: Slack used when snapping real window bounds onto integer grid indices.
_INDEX_TOL = 1e-9


def _check_order(v: float, b: int) -> None:
    if not (2.0 < v <= 3.0):
        raise InvalidArgument(f"order must satisfy 2 < v <= 3, got {v!r}")
    if b < 0 or int(b) != b:
        raise InvalidArgument(f"horizon b must be a nonnegative integer, got {b!r}")


def alpha(t: float, v: float) -> float:
    """The boundary-functional weight ``alpha(t) = t - v + 3``."""
    return t - v + 3.0


def greens_value(v: float, b: int, t: float, s: int) -> float:
    """Single kernel entry G(t, s), including the zero-extension edges."""
    _check_order(v, b)
    if s < 0 or s > b + 2 or int(s) != s:
        raise InvalidArgument(f"s must be an integer in [0, {b + 2}], got {s!r}")
    k = round(t - (v - 2.0))
    if not (-1 <= k <= b + 2) or abs(t - (v - 2.0 + k)) > _INDEX_TOL:
        raise InvalidArgument(f"t = {t!r} is not a grid point of [v-3, v+b]")
    common = (v - 1.0) * alpha(t, v) * falling_factorial(v + b - s - 1.0, v - 2.0)
    if s < k - 1:  # strictly left of the seam
        common -= falling_factorial(t - s - 1.0, v - 1.0)
    return common / math.exp(math.lgamma(v))


@dataclass(frozen=True)
class GreensMatrix:
    """Dense kernel over ``t = v-2+k`` (rows ``k = 0..b+2``) and ``s = 0..b+1``."""

    v: float
    b: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.b + 3, self.b + 2):
            raise InvalidArgument(
                f"expected shape {(self.b + 3, self.b + 2)}, got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("kernel entries must all be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def row_t(self, k: int) -> float:
        return self.v - 2.0 + k

    def terminal_row(self) -> np.ndarray:
        """Row at ``t = v + b``, which dominates every column."""
        return self.values[-1]

    def extended(self) -> np.ndarray:
        """Rows for ``t = v-3..v+b`` (a zero row stacked on top)."""
        return np.vstack([np.zeros(self.b + 2), self.values])


def greens_matrix(v: float, b: int) -> GreensMatrix:
    """Assemble the dense kernel for ``t = v-2..v+b``, ``s = 0..b+1``."""
    _check_order(v, b)
    vals = np.array(
        [[greens_value(v, b, v - 2.0 + k, s) for s in range(b + 2)] for k in range(b + 3)]
    )
    return GreensMatrix(v, b, vals)


def cone_window(v: float, b: int) -> tuple[int, int]:
    """Row indices ``k`` with ``(v+b)/4 <= v-2+k <= 3(v+b)/4``.

    Raises :class:`~fracbvp.errors.EmptyWindow` when no grid point falls in
    the quarter window (possible only for tiny ``b``).
    """
    _check_order(v, b)
    lo = math.ceil((v + b) / 4.0 - (v - 2.0) - _INDEX_TOL)
    hi = math.floor(3.0 * (v + b) / 4.0 - (v - 2.0) + _INDEX_TOL)
    lo = max(lo, 0)
    hi = min(hi, b + 2)
    if lo > hi:
        raise EmptyWindow(f"no grid point of [v-2, v+b] lies in the quarter window for v={v!r}, b={b}")
    return lo, hi


def rho_window(v: float, b: int) -> tuple[int, int]:
    """Column range for the windowed minimum sum: ceil/floor of the quarter
    bounds shifted by ``-v + 1``, clamped to ``[0, b+1]``."""
    _check_order(v, b)
    lo = math.ceil((b + v) / 4.0 - v + 1.0 - _INDEX_TOL)
    hi = math.floor(3.0 * (b + v) / 4.0 - v + 1.0 + _INDEX_TOL)
    lo = max(lo, 0)
    hi = min(hi, b + 1)
    if lo > hi:
        raise EmptyWindow(f"the windowed column range is empty for v={v!r}, b={b}")
    return lo, hi


def compute_gamma(G: GreensMatrix, window: tuple[int, int]) -> float:
    """Largest ``gamma`` with ``min_{window} G(t,s) >= gamma * G(v+b,s)`` columnwise."""
    lo, hi = window
    if lo > hi:
        raise EmptyWindow("window is empty")
    terminal = G.terminal_row()
    if np.any(terminal <= 1e-14):
        raise DegenerateColumn("terminal row has a vanishing column; ratio undefined")
    ratios = np.min(G.values[lo : hi + 1], axis=0) / terminal
    gamma = float(np.min(ratios))
    if not (0.0 < gamma < 1.0):
        raise DegenerateColumn(f"window/terminal ratio {gamma!r} is outside (0, 1)")
    return gamma


def compute_a_alpha(v: float, b: int, window: tuple[int, int]) -> float:
    """``min_{window} alpha / max alpha``; equals ``(window_lo + 1)/(b + 3)``."""
    lo, hi = window
    if lo > hi:
        raise EmptyWindow("window is empty")
    return alpha(v - 2.0 + lo, v) / (b + 3.0)


@dataclass(frozen=True)
class ConeConstants:
    """The cone ratio ``gamma_bar = min(gamma, a_alpha)`` and its window."""

    gamma: float
    a_alpha: float
    gamma_bar: float
    window_lo: int
    window_hi: int


def cone_constants(G: GreensMatrix) -> ConeConstants:
    window = cone_window(G.v, G.b)
    g = compute_gamma(G, window)
    aa = compute_a_alpha(G.v, G.b, window)
    return ConeConstants(g, aa, min(g, aa), window[0], window[1])


def _forcing_values(G: GreensMatrix, h: GridFn) -> np.ndarray:
    if h.grid.count != G.b + 2 or abs(h.grid.offset - (G.v - 1.0)) > OFFSET_TOL:
        raise InvalidArgument(
            f"forcing must be sampled at s + v - 1 for s = 0..{G.b + 1} "
            f"(offset {G.v - 1.0!r}, {G.b + 2} points)"
        )
    if np.any(h.values < 0.0):
        raise InvalidArgument("forcing values must be nonnegative")
    return h.values


def compute_eta(G: GreensMatrix, h: GridFn) -> float:
    """Twice the maximal G-weighted row sum of the forcing ``h``."""
    hv = _forcing_values(G, h)
    row_sums = G.values @ hv
    top = float(np.max(row_sums))
    # nonnegativity plus terminal-row dominance force the max onto t = v+b
    if row_sums[-1] < top - 1e-12 * max(top, 1.0):
        raise DegenerateColumn("row-sum maximum did not land on the terminal row")
    return 2.0 * top


def compute_rho(G: GreensMatrix, h: GridFn) -> float:
    """Minimal windowed G-weighted row sum of the forcing ``h``."""
    hv = _forcing_values(G, h)
    lo, hi = rho_window(G.v, G.b)
    return float(np.min(G.values[:, lo : hi + 1] @ hv[lo : hi + 1]))
