"""Numerical solver and verification suite for the classical Neumann problem
of mixed Hessian equations sigma_k(D^2 u) = sum_l alpha_l(x) sigma_l(D^2 u).

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from mhneumann._core import (  # noqa: F401
    ConfigError,
    EpsPathRecord,
    Expr,
    ExprError,
    GridError,
    NotAdmissibleError,
    SolveResult,
    SolverError,
    binomial,
    concavity_probe,
    g_gradient,
    g_value,
    in_cone,
    in_cone_tol,
    min_eig_derivative_check,
    newton_maclaurin_ratio,
    run,
    sigma,
    sigma_del1,
    sigma_del2,
    solve,
    spectral,
    trace_bounds,
)

__all__ = [
    "ConfigError",
    "EpsPathRecord",
    "Expr",
    "ExprError",
    "GridError",
    "NotAdmissibleError",
    "SolveResult",
    "SolverError",
    "binomial",
    "concavity_probe",
    "g_gradient",
    "g_value",
    "in_cone",
    "in_cone_tol",
    "min_eig_derivative_check",
    "newton_maclaurin_ratio",
    "run",
    "sigma",
    "sigma_del1",
    "sigma_del2",
    "solve",
    "spectral",
    "trace_bounds",
]

__version__ = "0.1.0"
