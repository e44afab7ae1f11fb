"""Far-field asymptotics of fully nonlinear uniformly elliptic equations."""

from ._farfield import (
    Ellipticity,
    ExtractionError,
    FundamentalSolution,
    GridFunction,
    InvalidConfiguration,
    InvalidInput,
    MissingBaseline,
    NonConvergence,
    Operator,
    classify_tail,
    config_hash,
    decay_case,
    estimate_limit_at_infinity,
    estimate_scaling_exponent,
    extract_linear_profile,
    extract_quadratic_profile,
    fit_decay,
    list_scenarios,
    rotation_invariant_exponent,
    run,
    scaling_exponents,
    solve_polar,
    solve_radial,
    verify,
    verify_decay_bounds,
)

__all__ = [
    "Ellipticity",
    "ExtractionError",
    "FundamentalSolution",
    "GridFunction",
    "InvalidConfiguration",
    "InvalidInput",
    "MissingBaseline",
    "NonConvergence",
    "Operator",
    "classify_tail",
    "config_hash",
    "decay_case",
    "estimate_limit_at_infinity",
    "estimate_scaling_exponent",
    "extract_linear_profile",
    "extract_quadratic_profile",
    "fit_decay",
    "list_scenarios",
    "rotation_invariant_exponent",
    "run",
    "scaling_exponents",
    "solve_polar",
    "solve_radial",
    "verify",
    "verify_decay_bounds",
]
