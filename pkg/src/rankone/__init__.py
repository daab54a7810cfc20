"""Exactly solvable homogeneous rank-one perturbations of the position operator on L^2(0, inf)."""

__version__ = "0.1.0"

from .branchcut import (
    BoundaryPoint,
    BranchCutError,
    boundary_log_neg,
    boundary_neg_power,
    log_neg,
    neg_power,
)
from .grid import GridVector, KernelMatrix, LogGrid, default_grid
from .greens import (
    INF,
    PerturbationParams,
    PoleError,
    g_boundary,
    g_value,
    kappa_from_lambda,
    lambda_from_rho,
    resolvent_apply,
    resolvent_kernel,
    rho_from_lambda,
    varsigma,
)

__all__ = [
    "BoundaryPoint",
    "BranchCutError",
    "GridVector",
    "INF",
    "KernelMatrix",
    "LogGrid",
    "PerturbationParams",
    "PoleError",
    "boundary_log_neg",
    "boundary_neg_power",
    "default_grid",
    "g_boundary",
    "g_value",
    "kappa_from_lambda",
    "lambda_from_rho",
    "log_neg",
    "neg_power",
    "resolvent_apply",
    "resolvent_kernel",
    "rho_from_lambda",
    "varsigma",
]
