"""Discrete fractional calculus and Green's-function machinery for Caputo
fractional difference boundary value problems of order 2 < v <= 3."""

from .bvp import (
    ConditionReport,
    GrowthClass,
    ProblemSpec,
    RadiusScanRow,
    SolveReport,
    apply_operator_F,
    check_conditions,
    cone_contains,
    greens_solve_linear,
    phi_eval,
    picard_solve,
    radius_scan,
    sample_cone,
    solve_linear_oracle,
    verify_solution,
)
from .fracgrid import GridFn, ShiftedGrid, delta, grid_fn, make_grid, sample
from .fracops import FracOrder, caputo_diff, frac_sum
from .greens import (
    ConeConstants,
    GreensMatrix,
    alpha,
    compute_a_alpha,
    compute_eta,
    compute_gamma,
    compute_rho,
    cone_constants,
    cone_window,
    greens_matrix,
    greens_value,
    rho_window,
)
from .specfun import SignedLog, falling_factorial, is_gamma_pole, log_gamma_signed

__version__ = "0.1.0"

__all__ = [
    "ConditionReport",
    "ConeConstants",
    "FracOrder",
    "GreensMatrix",
    "GridFn",
    "GrowthClass",
    "ProblemSpec",
    "RadiusScanRow",
    "ShiftedGrid",
    "SignedLog",
    "SolveReport",
    "alpha",
    "apply_operator_F",
    "caputo_diff",
    "check_conditions",
    "compute_a_alpha",
    "compute_eta",
    "compute_gamma",
    "compute_rho",
    "cone_constants",
    "cone_contains",
    "cone_window",
    "delta",
    "falling_factorial",
    "frac_sum",
    "greens_matrix",
    "greens_solve_linear",
    "greens_value",
    "grid_fn",
    "is_gamma_pole",
    "log_gamma_signed",
    "make_grid",
    "phi_eval",
    "picard_solve",
    "radius_scan",
    "rho_window",
    "sample",
    "sample_cone",
    "solve_linear_oracle",
    "verify_solution",
]
