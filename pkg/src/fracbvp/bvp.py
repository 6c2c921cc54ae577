"""The nonlinear boundary value problem and its solution machinery.

The problem on the shifted grid ``N_{v-3}`` (order ``2 < v <= 3``, horizon
``b``, parameter ``lambda > 0``) is

    caputo_diff(y, v)(t) = -lambda * h(t+v-1) * g(y(t+v-1)),   t = 0..b+1
    y(v-3) = 0,      delta(y, 2)(v-3) = 0,      delta(y, 1)(v+b) = phi(y)

with the linear boundary functional
``phi(y) = sum_k c_k/(b+3) * y(v-3+k)`` over ``k = 0..b+3``.

Solutions are fixed points of the operator

    (F y)(t) = lambda * sum_s G(t,s) h(s+v-1) g(y(s+v-1)) + alpha(t) * phi(y)

acting on the cone of positive functions whose quarter-window minimum
dominates ``gamma_bar`` times their sup norm and on which ``phi`` is
nonnegative.  Two independent linear routes are provided (a dense collocation
solve and the assembled Green's kernel plus functional resolution), a damped
Picard iteration for the nonlinear problem, a defect verifier, and an
empirical radius scan of ``|F(r u)| / r`` over cone directions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidArgument,
    ResonantFunctional,
    SamplingFailure,
    SingularSystem,
)
from .exprlang import Expr, evaluate, parse
from .fracgrid import GridFn, OFFSET_TOL, make_grid
from .fracops import FracOrder, caputo_diff
from .greens import ConeConstants, GreensMatrix, cone_constants, greens_matrix
from .specfun import falling_factorial

#: Iterates whose sup norm exceeds this are declared divergent.
DIVERGENCE_LIMIT = 1e12

#: Probe points for classifying the growth of g(y)/y near 0 and near infinity.
SMALL_PROBES = (1e-6, 1e-4, 1e-2)
LARGE_PROBES = (1e1, 1e2, 1e3)


@dataclass(frozen=True)
class ProblemSpec:
    """Full description of one boundary value problem."""

    v: float
    b: int
    lam: float
    h_expr: Expr
    g_expr: Expr
    phi_coeffs: tuple[float, ...]

    def __post_init__(self):
        if not (2.0 < self.v <= 3.0):
            raise InvalidArgument(f"order must satisfy 2 < v <= 3, got {self.v!r}")
        if self.b < 0 or int(self.b) != self.b:
            raise InvalidArgument(f"horizon b must be a nonnegative integer, got {self.b!r}")
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise InvalidArgument(f"lambda must be positive, got {self.lam!r}")
        coeffs = tuple(float(c) for c in self.phi_coeffs)
        if len(coeffs) != self.b + 4:
            raise InvalidArgument(
                f"phi_coeffs must have length b + 4 = {self.b + 4}, got {len(coeffs)}"
            )
        object.__setattr__(self, "phi_coeffs", coeffs)

    @classmethod
    def from_strings(cls, v: float, b: int, lam: float, h: str, g: str, phi_coeffs) -> "ProblemSpec":
        return cls(v, b, lam, parse(h, "t"), parse(g, "y"), tuple(phi_coeffs))

    # -- grids ---------------------------------------------------------------

    def solution_grid(self, extended: bool = False):
        """``N_{v-3}`` with ``b+4`` points, or ``b+5`` when extended to ``v+b+1``."""
        return make_grid(self.v - 3.0, self.b + 5 if extended else self.b + 4)

    def forcing_grid(self):
        """Points ``s + v - 1`` for ``s = 0..b+1``."""
        return make_grid(self.v - 1.0, self.b + 2)

    # -- pointwise data ------------------------------------------------------

    def h_at(self, t: float) -> float:
        return evaluate(self.h_expr, t)

    def g_at(self, y: float) -> float:
        return evaluate(self.g_expr, y)

    def forcing_fn(self) -> GridFn:
        """h sampled on the forcing grid."""
        grid = self.forcing_grid()
        return GridFn(grid, np.array([self.h_at(t) for t in grid.points()]))

    def phi_weights(self) -> np.ndarray:
        """The applied weights ``c_k / (b+3)``."""
        return np.asarray(self.phi_coeffs) / (self.b + 3.0)

    def alpha_fn(self) -> GridFn:
        """``alpha(t) = t - v + 3`` on ``N_{v-3}``; equals k at index k."""
        return GridFn(self.solution_grid(), np.arange(self.b + 4, dtype=float))


def _require_solution_values(y: GridFn, spec: ProblemSpec, count: int) -> np.ndarray:
    if abs(y.grid.offset - (spec.v - 3.0)) > OFFSET_TOL or y.grid.count < count:
        raise InvalidArgument(
            f"expected a grid function on N_(v-3) with at least {count} points, "
            f"got offset {y.grid.offset!r} with {y.grid.count}"
        )
    return y.values[:count]


def phi_eval(y: GridFn, spec: ProblemSpec) -> float:
    """The boundary functional ``sum_k c_k/(b+3) * y(v-3+k)``."""
    vals = _require_solution_values(y, spec, spec.b + 4)
    return float(np.dot(spec.phi_weights(), vals))


def apply_operator_F(y: GridFn, spec: ProblemSpec, G: GreensMatrix) -> GridFn:
    """One application of the solution operator; output on ``t = v-3..v+b``.

    The value at ``v-3`` is 0: the kernel row there vanishes and so does
    ``alpha``.  Expression errors from h or g propagate.
    """
    vals = _require_solution_values(y, spec, spec.b + 4)
    ys = vals[2:]  # y(s + v - 1) for s = 0..b+1
    forcing = np.array(
        [spec.h_at(s + spec.v - 1.0) * spec.g_at(float(ys[s])) for s in range(spec.b + 2)]
    )
    core = spec.lam * (G.values @ forcing)
    phi_y = phi_eval(y, spec)
    out = np.concatenate([[0.0], core]) + np.arange(spec.b + 4, dtype=float) * phi_y
    return GridFn(spec.solution_grid(), out)


def cone_contains(y: GridFn, cc: ConeConstants, spec: ProblemSpec) -> bool:
    """Membership in the cone: positivity on ``[v-2, v+b]``, window minimum
    at least ``gamma_bar`` times the sup norm, and ``phi(y) >= 0`` (all with
    1e-12 slack on the inequalities, strict positivity without)."""
    vals = _require_solution_values(y, spec, spec.b + 4)
    interior = vals[1:]  # t in [v-2, v+b]
    if np.any(interior <= 0.0):
        return False
    norm = float(np.max(np.abs(interior)))
    window_min = float(np.min(interior[cc.window_lo : cc.window_hi + 1]))
    if window_min < cc.gamma_bar * norm - 1e-12:
        return False
    return phi_eval(y, spec) >= -1e-12


# ---------------------------------------------------------------------------
# structural conditions


class GrowthClass(enum.Enum):
    """Trend of g(y)/y at 0+ and at infinity."""

    SUPERLINEAR = "F2-like"  # vanishes at 0+, grows at infinity
    SUBLINEAR = "F3-like"  # grows at 0+, vanishes at infinity
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the structural checks on a problem's h, g and phi."""

    g1_linear: bool
    g2_nonneg: bool
    g2_sum: float
    g2_sum_ok: bool
    g3_phi_alpha: float
    g3_ok: bool
    f_class: GrowthClass
    samples: tuple[tuple[float, float | None], ...]

    @property
    def pole_adjacent(self) -> bool:
        """True when some probe of g hit an expression pole and was skipped."""
        return any(r is None for _, r in self.samples)

    @property
    def all_ok(self) -> bool:
        return self.g1_linear and self.g2_nonneg and self.g2_sum_ok and self.g3_ok


def _strictly_increasing(seq) -> bool:
    return all(a < b for a, b in zip(seq, seq[1:]))


def _strictly_decreasing(seq) -> bool:
    return all(a > b for a, b in zip(seq, seq[1:]))


def check_conditions(spec: ProblemSpec, G: GreensMatrix) -> ConditionReport:
    """Evaluate the boundary-functional positivity checks and classify g.

    The kernel-weighted check uses the zero-extended rows ``t = v-3..v+b``.
    Probes of ``g(y)/y`` that hit expression poles are skipped and flagged.
    """
    weights = spec.phi_weights()
    col_sums = weights @ G.extended()
    g2_nonneg = bool(np.all(col_sums >= -1e-12))
    g2_sum = float(np.sum(weights))
    g2_sum_ok = g2_sum <= 0.5 + 1e-12
    g3_phi_alpha = float(np.dot(weights, np.arange(spec.b + 4)))
    g3_ok = g3_phi_alpha >= -1e-12

    samples: list[tuple[float, float | None]] = []
    for probe in SMALL_PROBES + LARGE_PROBES:
        try:
            samples.append((probe, spec.g_at(probe) / probe))
        except Exception:
            samples.append((probe, None))
    small = [r for p, r in samples if p in SMALL_PROBES and r is not None]
    large = [r for p, r in samples if p in LARGE_PROBES and r is not None]
    if len(small) >= 2 and len(large) >= 2:
        if _strictly_increasing(small) and _strictly_increasing(large):
            f_class = GrowthClass.SUPERLINEAR
        elif _strictly_decreasing(small) and _strictly_decreasing(large):
            f_class = GrowthClass.SUBLINEAR
        else:
            f_class = GrowthClass.INCONCLUSIVE
    else:
        f_class = GrowthClass.INCONCLUSIVE

    return ConditionReport(
        g1_linear=True,
        g2_nonneg=g2_nonneg,
        g2_sum=g2_sum,
        g2_sum_ok=g2_sum_ok,
        g3_phi_alpha=g3_phi_alpha,
        g3_ok=g3_ok,
        f_class=f_class,
        samples=tuple(samples),
    )


# ---------------------------------------------------------------------------
# linear solvers


def solve_linear_oracle(spec: ProblemSpec, forcing: GridFn | None = None) -> GridFn:
    """Solve the linear problem (g == 1) by dense collocation.

    Unknowns are the ``b+5`` values ``y(v-3)..y(v+b+1)``; rows are the
    Caputo equations at ``t = 0..b+1`` written out through the third
    difference, plus the three boundary rows.  This route never touches the
    assembled kernel, so it serves as the independent check of
    :func:`greens_solve_linear` and of the kernel itself.

    ``forcing`` replaces the problem's h samples on the forcing grid when given
    (needed for forcings, such as unit impulses, that are not expressions).
    """
    v, b, lam = spec.v, spec.b, spec.lam
    if forcing is None:
        forcing = spec.forcing_fn()
    elif forcing.grid.count != b + 2 or abs(forcing.grid.offset - (v - 1.0)) > OFFSET_TOL:
        raise InvalidArgument("forcing must be sampled on the forcing grid (offset v-1, b+2 points)")
    m = b + 5
    order = FracOrder.of(v)
    mu = order.n - v
    A = np.zeros((m, m))
    rhs = np.zeros(m)
    rhs[: b + 2] = -lam * forcing.values
    stencil = np.array([-1.0, 3.0, -3.0, 1.0])  # third forward difference
    if mu == 0.0:
        for j in range(b + 2):
            A[j, j : j + 4] += stencil
    else:
        kernel = np.array(
            [falling_factorial(mu - 1.0 + d, mu - 1.0) for d in range(b + 2)]
        )
        scale = 1.0 / math.gamma(mu)
        for j in range(b + 2):
            for i in range(j + 1):
                A[j, i : i + 4] += scale * kernel[j - i] * stencil
    A[b + 2, 0] = 1.0  # y(v-3) = 0
    A[b + 3, 0:3] = (1.0, -2.0, 1.0)  # second difference at v-3 vanishes
    A[b + 4, b + 4] = 1.0  # first difference at v+b equals phi(y)
    A[b + 4, b + 3] -= 1.0
    A[b + 4, : b + 4] -= spec.phi_weights()
    if np.linalg.cond(A) > 1e12:
        raise SingularSystem("boundary value system is numerically singular")
    return GridFn(spec.solution_grid(extended=True), np.linalg.solve(A, rhs))


def _terminal_extension(spec: ProblemSpec, h_tilde: np.ndarray, phi_y: float) -> float:
    """Value at ``t = v+b+1`` from the closed-form series solution.

    The quadratic coefficient vanishes by the second-difference condition;
    the linear and constant coefficients are pinned by the other two boundary
    conditions, giving ``C1 = -(v-3) C2``.
    """
    v, b = spec.v, spec.b
    t = v + b + 1.0
    series = sum(
        falling_factorial(v + b - s, v - 1.0) * h_tilde[s] for s in range(b + 2)
    ) / math.gamma(v)
    c2 = (
        sum(falling_factorial(v + b - s - 1.0, v - 2.0) * h_tilde[s] for s in range(b + 2))
        / math.gamma(v - 1.0)
        + phi_y
    )
    c1 = -(v - 3.0) * c2
    return -series + c1 + c2 * t


def greens_solve_linear(h: GridFn, spec: ProblemSpec, G: GreensMatrix) -> GridFn:
    """Solve the linear problem through the assembled kernel.

    Computes ``w = lambda * G h``, resolves the implicit functional coupling
    via ``phi(y) = phi(w) / (1 - phi(alpha))``, and extends to ``v+b+1``
    through the closed-form series tail.
    """
    if h.grid.count != spec.b + 2 or abs(h.grid.offset - (spec.v - 1.0)) > OFFSET_TOL:
        raise InvalidArgument("h must be sampled on the forcing grid (offset v-1, b+2 points)")
    weights = spec.phi_weights()
    phi_alpha = float(np.dot(weights, np.arange(spec.b + 4)))
    if abs(1.0 - phi_alpha) <= 1e-10:
        raise ResonantFunctional(
            f"phi(alpha) = {phi_alpha!r} resonates with the boundary coupling"
        )
    h_tilde = spec.lam * h.values
    w = np.concatenate([[0.0], G.values @ h_tilde])
    phi_y = float(np.dot(weights, w)) / (1.0 - phi_alpha)
    y_core = w + np.arange(spec.b + 4, dtype=float) * phi_y
    tail = _terminal_extension(spec, h_tilde, phi_y)
    return GridFn(spec.solution_grid(extended=True), np.append(y_core, tail))


# ---------------------------------------------------------------------------
# nonlinear solve and verification


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one Picard run, with the defect-verified solution."""

    solution: GridFn = field(repr=False)
    iterations: int
    final_step: float
    residual: float
    converged: bool
    in_cone: bool
    phi_value: float
    diverged: bool = False


def verify_solution(y_ext: GridFn, spec: ProblemSpec) -> float:
    """Maximum defect of the extended solution over all equations and
    boundary conditions."""
    if y_ext.grid.count != spec.b + 5 or abs(y_ext.grid.offset - (spec.v - 3.0)) > OFFSET_TOL:
        raise InvalidArgument(
            f"expected the extended solution grid (offset v-3, {spec.b + 5} points)"
        )
    yv = y_ext.values
    cap = caputo_diff(y_ext, spec.v)  # lives on t = 0..b+1
    worst = 0.0
    for j in range(spec.b + 2):
        rhs = -spec.lam * spec.h_at(j + spec.v - 1.0) * spec.g_at(float(yv[j + 2]))
        worst = max(worst, abs(float(cap.values[j]) - rhs))
    worst = max(worst, abs(float(yv[0])))
    worst = max(worst, abs(float(yv[2] - 2.0 * yv[1] + yv[0])))
    worst = max(worst, abs(float(yv[spec.b + 4] - yv[spec.b + 3]) - phi_eval(y_ext, spec)))
    return worst


def picard_solve(
    spec: ProblemSpec,
    y0: GridFn,
    tol: float = 1e-10,
    max_iter: int = 10000,
    damping: float = 0.5,
) -> SolveReport:
    """Damped fixed-point iteration ``y <- (1-damping) y + damping F(y)``.

    Stops when the sup-norm step drops to ``tol``, the iterate's sup norm
    exceeds ``DIVERGENCE_LIMIT`` (reported via the ``diverged`` flag, not an
    error), or ``max_iter`` is reached.  The returned solution is extended to
    ``v+b+1`` through the closed-form tail with the converged forcing values,
    and ``converged`` additionally requires the verified residual to stay
    within ``100 * tol``.
    """
    if not (tol > 0.0):
        raise InvalidArgument(f"tol must be positive, got {tol!r}")
    if not (0.0 < damping <= 1.0):
        raise InvalidArgument(f"damping must lie in (0, 1], got {damping!r}")
    if max_iter < 1:
        raise InvalidArgument(f"max_iter must be at least 1, got {max_iter!r}")
    G = greens_matrix(spec.v, spec.b)
    cc = cone_constants(G)
    grid = spec.solution_grid()
    y = np.array(_require_solution_values(y0, spec, spec.b + 4))
    step = math.inf
    diverged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        fy = apply_operator_F(GridFn(grid, y), spec, G).values
        y_next = (1.0 - damping) * y + damping * fy
        step = float(np.max(np.abs(y_next - y)))
        y = y_next
        if float(np.max(np.abs(y))) > DIVERGENCE_LIMIT:
            diverged = True
            break
        if step <= tol:
            break

    y_fn = GridFn(grid, y)
    phi_y = phi_eval(y_fn, spec)
    try:
        h_tilde = np.array(
            [
                spec.lam * spec.h_at(s + spec.v - 1.0) * spec.g_at(float(y[s + 2]))
                for s in range(spec.b + 2)
            ]
        )
        tail = _terminal_extension(spec, h_tilde, phi_y)
        y_ext = GridFn(spec.solution_grid(extended=True), np.append(y, tail))
        residual = verify_solution(y_ext, spec)
    except Exception:
        if not diverged:
            raise
        # divergent iterates may push g past a pole; report the truncated
        # state with the trivial tail rather than erroring out
        y_ext = GridFn(spec.solution_grid(extended=True), np.append(y, y[-1] + phi_y))
        residual = math.inf
    converged = (not diverged) and step <= tol and residual <= 100.0 * tol
    return SolveReport(
        solution=y_ext,
        iterations=iterations,
        final_step=step,
        residual=residual,
        converged=converged,
        in_cone=cone_contains(y_ext, cc, spec),
        phi_value=phi_y,
        diverged=diverged,
    )


# ---------------------------------------------------------------------------
# cone sampling and the radius scan


def sample_cone(
    spec: ProblemSpec,
    cc: ConeConstants,
    rng: np.random.Generator,
    radius: float = 1.0,
    max_attempts: int = 10000,
) -> GridFn:
    """A random cone element with sup norm ``radius`` on ``[v-2, v+b]``.

    Componentwise uniform draws from ``(gamma_bar, 1)`` scaled to the target
    norm satisfy the window inequality by construction; ``phi(y) >= 0`` is
    enforced by rejection.
    """
    if not (radius > 0.0):
        raise InvalidArgument(f"radius must be positive, got {radius!r}")
    grid = spec.solution_grid()
    for _ in range(max_attempts):
        vals = rng.uniform(cc.gamma_bar, 1.0, size=spec.b + 3)
        y = np.concatenate([[0.0], vals * (radius / float(np.max(vals)))])
        candidate = GridFn(grid, y)
        if phi_eval(candidate, spec) >= 0.0:
            return candidate
    raise SamplingFailure(
        f"no cone element found in {max_attempts} attempts; "
        "the boundary functional may be incompatible with positivity"
    )


@dataclass(frozen=True)
class RadiusScanRow:
    radius: float
    ratio_min: float
    ratio_mean: float
    ratio_max: float


def radius_scan(
    spec: ProblemSpec, radii, n_dirs: int, seed: int
) -> list[RadiusScanRow]:
    """Sample ``|F(r u)| / r`` over unit cone directions ``u`` for each radius.

    A problem amenable to the compression argument shows ratios below 1 at
    some small radius and above 1 at some large one; the expansion variant
    shows the reverse pattern.
    """
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0.0 for r in radii):
        raise InvalidArgument("radii must be positive")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidArgument("radii must be strictly increasing")
    if n_dirs < 1:
        raise InvalidArgument("n_dirs must be at least 1")
    G = greens_matrix(spec.v, spec.b)
    cc = cone_constants(G)
    rng = np.random.default_rng(seed)
    grid = spec.solution_grid()
    rows = []
    for r in radii:
        ratios = []
        for _ in range(n_dirs):
            u = sample_cone(spec, cc, rng)
            fu = apply_operator_F(GridFn(grid, r * u.values), spec, G)
            ratios.append(float(np.max(np.abs(fu.values[1:]))) / r)
        rows.append(
            RadiusScanRow(r, min(ratios), sum(ratios) / len(ratios), max(ratios))
        )
    return rows
